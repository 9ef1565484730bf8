#include <doctest.h>

#include <cmath>
#include <limits>

#include "voi/estimators.hpp"
#include "voi/models/gaussian_toy.hpp"
#include "support_models.hpp"

using namespace voi;
using models::GaussianToy;
using namespace voi::testing;

namespace {

constexpr double kToyEvsi = 0.28209479;  // sqrt(0.5) / sqrt(2 pi)

struct ToySetup {
  GaussianToy toy{0.0, 1.0, 2.0};
  PsaSet psa;
  IncrementalNbTable inb;
  EvppiResult evppi;

  explicit ToySetup(std::size_t s, std::uint64_t seed = 1) : psa(make_psa(s, seed)) {
    inb = incremental(compute_nb_table(toy, psa, 1.0));
    evppi = evppi_regression(inb, psa, BasisSpec::spline());
  }
  PsaSet make_psa(std::size_t s, std::uint64_t seed) {
    Rng rng(seed);
    return toy.sample_prior(s, rng);
  }
};

double tolerance(const EvsiEstimate& e) { return std::max(3.0 * e.se, 0.05 * kToyEvsi); }

}  // namespace

TEST_CASE("analytic toy evsi") {
  CHECK(models::gaussian_toy_evsi_analytic(0, 1, 2, 4) == doctest::Approx(kToyEvsi).epsilon(1e-6));
  CHECK(models::gaussian_toy_evsi_analytic(0, 1, 2, 0) == 0.0);
  CHECK(models::gaussian_toy_evsi_analytic(0.3, 1, 2, 1e9) ==
        doctest::Approx(models::unit_normal_loss(0.3)).epsilon(1e-6));
  CHECK_THROWS(models::gaussian_toy_evsi_analytic(0, 1, 2, -1));
}

TEST_CASE("strong") {
  ToySetup t(5000);
  Rng rng(2);
  auto e = evsi_strong(t.toy, t.psa, t.inb, t.toy.design(4), BasisSpec::spline(), rng);
  CHECK(std::abs(e.value - kToyEvsi) < tolerance(e));

  NoiseModel noise;
  Rng r2(3);
  const PsaSet psa = noise.sample_prior(5000, r2);
  const auto inb = incremental(compute_nb_table(noise, psa, 1.0));
  auto z = evsi_strong(noise, psa, inb, noise.design(10), BasisSpec::spline(), r2);
  CHECK(std::abs(z.value) < 2.0 * z.se + 0.005);

  Rng r3(4);
  CHECK(evsi_strong(t.toy, t.psa, t.inb, t.toy.design(0), BasisSpec::spline(), r3).value == doctest::Approx(0.0));

  Rng r4(4);
  auto bad = [](const Dataset&) { return std::vector<double>{std::nan("")}; };
  CHECK_THROWS_AS(evsi_strong(t.toy, t.psa, t.inb, t.toy.design(4), BasisSpec::spline(), r4, bad), EstimatorError);
}

TEST_CASE("menzies") {
  ToySetup t(5000);
  Rng rng(5);
  auto m = evsi_menzies(t.evppi.mu_phi, t.toy, t.psa, t.toy.design(4), MenziesOptions{5000, 2000, 0.05}, rng);
  CHECK(std::abs(m.estimate.value - kToyEvsi) < tolerance(m.estimate));
  CHECK(m.ess.size() == 2000);
  CHECK(m.estimate.warnings.empty());

  NoiseModel noise;
  Rng r2(6);
  const PsaSet psa = noise.sample_prior(1000, r2);
  const auto inb = incremental(compute_nb_table(noise, psa, 1.0));
  const auto ev = evppi_regression(inb, psa, BasisSpec::spline());
  auto flat = evsi_menzies(ev.mu_phi, noise, psa, noise.design(10), {}, r2);
  CHECK(flat.estimate.value == 0.0);

  SelfWeightModel self;
  Rng r3(7);
  const PsaSet sp = self.sample_prior(1000, r3);
  const auto sinb = incremental(compute_nb_table(self, sp, 1.0));
  const auto sev = evppi_regression(sinb, sp, BasisSpec::spline());
  auto degenerate = evsi_menzies(sev.mu_phi, self, sp, self.design(1), {}, r3);
  CHECK(degenerate.estimate.value == doctest::Approx(sev.value).epsilon(1e-9));
  CHECK(degenerate.mean_ess == doctest::Approx(1.0));
  CHECK_FALSE(degenerate.estimate.warnings.empty());
}

TEST_CASE("n0 nested: gaussian toy") {
  GaussianToy toy(0.0, 1.0, 2.0);
  Rng rng(8);
  auto n0 = estimate_n0_nested(toy, 30, 2000, 200, rng);
  REQUIRE(n0.n0.size() == 1);
  CHECK(n0.n0[0] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(n0.route == N0Route::nested);
}

TEST_CASE("n0 nested: beta-binomial") {
  BetaBinomialModel bb;
  Rng rng(9);
  auto n0 = estimate_n0_nested(bb, 30, 20000, 100, rng);
  CHECK(n0.n0[0] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("n0 nested: uninformative data") {
  NoiseModel noise;
  Rng rng(10);
  auto n0 = estimate_n0_nested(noise, 30, 300, 100, rng);
  CHECK(n0.n0[0] > 100.0);
}

TEST_CASE("n0 from a summary variance") {
  ToySetup t(100);
  auto four = estimate_n0_summary(t.psa, [](std::span<const double>) { return std::vector<double>{4.0}; },
                                  std::vector<double>{1.0});
  CHECK(four.n0[0] == doctest::Approx(4.0));
  CHECK(four.route == N0Route::summary);
  auto one = estimate_n0_summary(t.psa, [](std::span<const double>) { return std::vector<double>{1.0}; },
                                 std::vector<double>{1.0});
  CHECK(one.n0[0] == doctest::Approx(1.0));
  auto five = estimate_n0_summary(t.psa, [](std::span<const double>) { return std::vector<double>{0.25}; },
                                  std::vector<double>{0.05});
  CHECK(five.n0[0] == doctest::Approx(5.0));
  CHECK_THROWS(estimate_n0_summary(t.psa, [](std::span<const double>) { return std::vector<double>{-1.0}; },
                                   std::vector<double>{1.0}));
}

TEST_CASE("jalal") {
  ToySetup t(5000);
  const N0Estimate n0{{4.0}, N0Route::analytic, {}};
  CHECK(evsi_jalal(t.evppi.fits, t.inb, 0.0, n0).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(evsi_jalal(t.evppi.fits, t.inb, 1e12, n0).value == doctest::Approx(t.evppi.value).epsilon(1e-6));

  auto e = evsi_jalal(t.evppi.fits, t.inb, 4.0, n0);
  CHECK(std::abs(e.value - kToyEvsi) < tolerance(e));

  // n = 150, N0 = 50: deviations scale by sqrt(0.75).
  const N0Estimate fifty{{50.0}, N0Route::analytic, {}};
  const Vector& f = t.evppi.fits[0].fitted;
  Matrix shrunk(f.size(), 1);
  shrunk.col(0) = (f.array() - f.mean()) * std::sqrt(0.75) + f.mean();
  CHECK(evsi_jalal(t.evppi.fits, t.inb, 150.0, fifty).value ==
        doctest::Approx(mean_max0(shrunk) - max0_of_means(t.inb.values)).epsilon(1e-9));

  double last = 0.0;
  for (double n : {1.0, 2.0, 5.0, 10.0, 50.0, 200.0}) {
    const double v = evsi_jalal(t.evppi.fits, t.inb, n, n0).value;
    CHECK(v >= last);
    last = v;
  }
  CHECK_THROWS(evsi_jalal(t.evppi.fits, t.inb, 4.0, N0Estimate{}));
}

TEST_CASE("heath") {
  ToySetup t(5000);
  Rng rng(11);
  auto var = heath_preposterior_variance(t.toy, t.psa, t.inb, t.evppi.mu_phi, t.toy.design(4), 50, 1000, rng);
  REQUIRE(var.sigma2.size() == 1);
  CHECK(var.sigma2[0] == doctest::Approx(0.5).epsilon(0.2));

  auto e = evsi_heath(t.evppi.mu_phi, var.sigma2, t.inb);
  CHECK(std::abs(e.value - kToyEvsi) < std::max(tolerance(e), 0.1 * kToyEvsi));

  const double zero[] = {0.0};
  CHECK(evsi_heath(t.evppi.mu_phi, zero, t.inb).value == doctest::Approx(0.0).epsilon(1e-12));
  const Vector& f = t.evppi.mu_phi.col(0);
  const double full[] = {(f.array() - f.mean()).square().sum() / static_cast<double>(f.size() - 1)};
  CHECK(evsi_heath(t.evppi.mu_phi, full, t.inb).value == doctest::Approx(t.evppi.value).epsilon(1e-9));

  double last = 0.0;
  for (double s2 : {0.05, 0.1, 0.3, 0.6, 0.9}) {
    const double s[] = {s2};
    const double v = evsi_heath(t.evppi.mu_phi, s, t.inb).value;
    CHECK(v >= last);
    last = v;
  }

  Matrix flat = Matrix::Zero(t.evppi.mu_phi.rows(), 1);
  const double some[] = {0.2};
  CHECK_THROWS_AS(evsi_heath(flat, some, t.inb), EstimatorError);
}

TEST_CASE("heath curve") {
  ToySetup t(5000);
  const std::size_t grid[] = {1, 4, 16, 64};
  Rng rng(12);
  auto curve = heath_variance_across_n(t.toy, t.psa, t.inb, t.evppi.mu_phi, grid, 50, 1000, rng);
  CHECK(curve.at(0)[0] == 0.0);
  // sigma^2_X(n) = n / (n + 4) for the toy.
  CHECK(curve.at(4)[0] == doctest::Approx(0.5).epsilon(0.25));
  double last = 0.0;
  for (double n : {1.0, 4.0, 16.0, 64.0}) {
    CHECK(curve.at(n)[0] >= last);
    last = curve.at(n)[0];
  }

  const std::size_t single[] = {4};
  Rng a(13), b(13);
  auto one = heath_variance_across_n(t.toy, t.psa, t.inb, t.evppi.mu_phi, single, 30, 500, a);
  auto direct = heath_preposterior_variance(t.toy, t.psa, t.inb, t.evppi.mu_phi, t.toy.design(4), 30, 500, b);
  CHECK(one.at(4)[0] == direct.sigma2[0]);

  const std::size_t narrow[] = {1, 2};
  Rng c(14);
  CHECK_THROWS(heath_variance_across_n(t.toy, t.psa, t.inb, t.evppi.mu_phi, narrow, 50, 100, c));
}

TEST_CASE("replicate harness") {
  CHECK(empirical_quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(empirical_quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));

  Rng rng(15);
  auto fixed = estimate_with_uncertainty([](Rng&) { return EvsiEstimate{Method::jalal, 4, 0.3}; }, 10, rng);
  CHECK(fixed.value == doctest::Approx(0.3));
  CHECK(fixed.lo == fixed.hi);
  CHECK(fixed.replicates == 10);
  CHECK_THROWS(estimate_with_uncertainty([](Rng&) { return EvsiEstimate{}; }, 1, rng));

  GaussianToy toy(0.0, 1.0, 2.0);
  auto width = [&](std::size_t s) {
    Rng r(16);
    auto e = estimate_with_uncertainty([&](Rng& x) { return evsi_nested_mc(toy, toy.design(4), s, 50, 1.0, x); },
                                       200, r);
    return e.hi - e.lo;
  };
  const double ratio = width(200) / width(800);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("every estimator is reproducible") {
  ToySetup t(2000);
  auto run = [&](std::uint64_t seed) {
    std::vector<double> v;
    Rng r(seed);
    v.push_back(evsi_strong(t.toy, t.psa, t.inb, t.toy.design(4), BasisSpec::spline(), r).value);
    v.push_back(evsi_menzies(t.evppi.mu_phi, t.toy, t.psa, t.toy.design(4), {500, 500, 0.05}, r).estimate.value);
    const auto n0 = estimate_n0_nested(t.toy, 4, 200, 100, r);
    v.push_back(evsi_jalal(t.evppi.fits, t.inb, 4.0, n0).value);
    const auto var = heath_preposterior_variance(t.toy, t.psa, t.inb, t.evppi.mu_phi, t.toy.design(4), 30, 200, r);
    v.push_back(evsi_heath(t.evppi.mu_phi, var.sigma2, t.inb).value);
    v.push_back(evsi_nested_mc(t.toy, t.toy.design(4), 200, 100, 1.0, r).value);
    return v;
  };
  CHECK(run(21) == run(21));
}

TEST_CASE("combine replicates") {
  std::vector<EvsiEstimate> runs(4);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    runs[i].value = static_cast<double>(i);
    runs[i].seconds = 2.0;
    runs[i].warnings = {"w"};
  }
  auto c = combine_replicates(runs);
  CHECK(c.value == doctest::Approx(1.5));
  CHECK(c.seconds == doctest::Approx(2.0));
  CHECK(c.warnings.size() == 1);
  CHECK(c.lo <= c.value);
  CHECK(c.value <= c.hi);

  EvsiEstimate single;
  single.value = 1.0;
  single.se = 0.1;
  auto s = combine_replicates({single});
  CHECK(s.lo == doctest::Approx(1.0 - 0.196));
  CHECK(s.hi == doctest::Approx(1.0 + 0.196));
}
