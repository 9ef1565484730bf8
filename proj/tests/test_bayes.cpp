#include <doctest.h>

#include <cmath>
#include <limits>

#include "voi/bayes.hpp"

using namespace voi;
using namespace voi::bayes;

namespace {

double mean_of(const Matrix& chain, Eigen::Index col = 0) { return chain.col(col).mean(); }
double var_of(const Matrix& chain, Eigen::Index col = 0) {
  const double m = mean_of(chain, col);
  return (chain.col(col).array() - m).square().sum() / static_cast<double>(chain.rows() - 1);
}

}  // namespace

TEST_CASE("conjugate beta-binomial") {
  auto p = conjugate_beta_binomial({1, 1}, 3, 10);
  CHECK(p.alpha == 4.0);
  CHECK(p.beta == 8.0);
  p = conjugate_beta_binomial({1, 1}, 0, 0);
  CHECK(p.alpha == 1.0);
  CHECK(p.beta == 1.0);
  p = conjugate_beta_binomial({2, 5}, 10, 10);
  CHECK(p.alpha == 12.0);
  CHECK(p.beta == 5.0);
  CHECK_THROWS(conjugate_beta_binomial({1, 1}, 11, 10));
  CHECK_THROWS(conjugate_beta_binomial({1, 1}, -1, 10));
}

TEST_CASE("moment_to_beta") {
  auto b = moment_to_beta(0.5, 0.5 * std::sqrt(1.0 / 3.0));
  CHECK(b.alpha == doctest::Approx(1.0));
  CHECK(b.beta == doctest::Approx(1.0));
  b = moment_to_beta(0.5, 0.3);
  CHECK(b.alpha == doctest::Approx(0.888889).epsilon(1e-5));
  CHECK(b.beta == doctest::Approx(0.888889).epsilon(1e-5));
  CHECK_THROWS(moment_to_beta(0.2, 0.45));
}

TEST_CASE("moment_to_gamma") {
  auto [shape, rate] = moment_to_gamma(200.0, 20.0);
  CHECK(shape / rate == doctest::Approx(200.0));
  CHECK(shape / (rate * rate) == doctest::Approx(400.0));
}

TEST_CASE("prior spec moments") {
  CHECK(PriorSpec::make_beta(4, 8).mean() == doctest::Approx(1.0 / 3.0));
  CHECK(PriorSpec::make_normal(0.65, 100).variance() == doctest::Approx(0.01));
  CHECK(PriorSpec::make_gamma(2, 4).mean() == doctest::Approx(0.5));
  CHECK(PriorSpec::make_uniform(0, 1).variance() == doctest::Approx(1.0 / 12.0));
  CHECK_THROWS(PriorSpec::make_beta(-1, 1).validate());
  CHECK_THROWS(PriorSpec::make_uniform(1, 0).validate());
}

TEST_CASE("mh on a standard normal") {
  MhConfig cfg;
  cfg.steps = 51000;
  cfg.burn_in = 1000;
  Rng rng(3);
  const double init[] = {0.0};
  auto res = mh_sample([](std::span<const double> x) { return -0.5 * x[0] * x[0]; }, init, cfg, rng);
  REQUIRE(res.chain.rows() == 50000);
  CHECK(std::abs(mean_of(res.chain)) < 0.03);
  CHECK(std::abs(var_of(res.chain) - 1.0) < 0.05);
  CHECK(res.converged());
  CHECK(res.acceptance[0] == doctest::Approx(0.44).epsilon(0.25));
}

TEST_CASE("mh on beta(4, 8) matches the conjugate posterior within 3 se") {
  const auto post = conjugate_beta_binomial({1, 1}, 3, 10);
  MhConfig cfg;
  cfg.steps = 41000;
  cfg.proposal_sd = {0.2};
  Rng rng(5);
  const double init[] = {0.5};
  auto res = mh_sample([&](std::span<const double> x) { return beta_log_density(x[0], post.alpha, post.beta); }, init,
                       cfg, rng);
  const double se = std::sqrt(post.variance() / res.ess[0]);
  CHECK(std::abs(mean_of(res.chain) - post.mean()) < 3.0 * se);
  CHECK(std::abs(mean_of(res.chain) - post.mean()) < 0.01);
}

TEST_CASE("mh on uniform(0, 1)") {
  MhConfig cfg;
  cfg.steps = 41000;
  Rng rng(9);
  const double init[] = {0.5};
  auto res = mh_sample(
      [](std::span<const double> x) {
        return x[0] > 0.0 && x[0] < 1.0 ? 0.0 : -std::numeric_limits<double>::infinity();
      },
      init, cfg, rng);
  CHECK(std::abs(mean_of(res.chain) - 0.5) < 0.02);
  CHECK(std::abs(var_of(res.chain) - 1.0 / 12.0) < 0.005);
}

TEST_CASE("mh errors and reproducibility") {
  MhConfig cfg;
  const double bad[] = {2.0};
  auto unit = [](std::span<const double> x) {
    return x[0] > 0.0 && x[0] < 1.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  };
  CHECK_THROWS_AS(mh_sample(unit, bad, cfg), std::invalid_argument);

  MhConfig broken;
  broken.burn_in = broken.steps;
  CHECK_THROWS(broken.validate());

  cfg.seed = 42;
  const double init[] = {0.5};
  auto a = mh_sample(unit, init, cfg);
  auto b = mh_sample(unit, init, cfg);
  CHECK(a.chain == b.chain);
}

TEST_CASE("mh flags a sampler that cannot adapt") {
  // A target with mass on two far-apart points: almost every proposal is rejected.
  MhConfig cfg;
  cfg.steps = 3000;
  cfg.proposal_sd = {1e-9};
  cfg.burn_in = 1;
  Rng rng(1);
  const double init[] = {0.0};
  auto res = mh_sample([](std::span<const double> x) { return std::abs(x[0]) < 1e-12 ? 0.0 : -1e9; }, init, cfg, rng);
  CHECK_FALSE(res.converged());
}

TEST_CASE("effective sample size of independent draws is near the chain length") {
  Rng rng(2);
  std::vector<double> x(4000);
  for (double& v : x) v = rng.normal();
  const double ess = effective_sample_size(x);
  CHECK(ess > 3000.0);
  CHECK(ess < 5000.0);
}
