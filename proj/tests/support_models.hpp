#pragma once

#include <cmath>
#include <limits>

#include "voi/core.hpp"

namespace voi::testing {

// theta ~ N(0, 1), NB = (0, theta); the study observes noise unrelated to theta.
class NoiseModel final : public DecisionModel {
 public:
  std::string name() const override { return "noise"; }
  std::size_t arms() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"theta"}; }
  std::vector<std::size_t> focal() const override { return {0}; }
  PsaSet sample_prior(std::size_t count, Rng& rng) const override {
    Matrix m(static_cast<Eigen::Index>(count), 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, 0) = rng.normal();
    return PsaSet{m, parameter_names(), focal()};
  }
  std::vector<double> net_benefit(std::span<const double> t, double) const override { return {0.0, t[0]}; }
  Dataset sample_data(std::span<const double>, const StudyDesign& d, Rng& rng) const override {
    Dataset data{d, {}};
    data.arrays["z"] = {rng.normal()};
    return data;
  }
  PsaSet posterior_sample(const Dataset&, std::size_t count, Rng& rng) const override {
    return sample_prior(count, rng);
  }
  double log_likelihood(const Dataset&, std::span<const double>) const override { return -1.5; }
  std::vector<double> summarize(const Dataset& d) const override {
    return d.empty() ? std::vector<double>{0.0} : std::vector<double>{d.scalar("z")};
  }
};

// Likelihood is 1 at the generating phi and 0 elsewhere.
class SelfWeightModel final : public DecisionModel {
 public:
  std::string name() const override { return "self"; }
  std::size_t arms() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"theta", "psi"}; }
  std::vector<std::size_t> focal() const override { return {0}; }
  PsaSet sample_prior(std::size_t count, Rng& rng) const override {
    Matrix m(static_cast<Eigen::Index>(count), 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, 0) = rng.normal();
      m(i, 1) = rng.normal();
    }
    return PsaSet{m, parameter_names(), focal()};
  }
  std::vector<double> net_benefit(std::span<const double> t, double) const override { return {0.0, t[0] + t[1]}; }
  Dataset sample_data(std::span<const double> phi, const StudyDesign& d, Rng&) const override {
    Dataset data{d, {}};
    data.arrays["phi"] = {phi[0]};
    return data;
  }
  PsaSet posterior_sample(const Dataset&, std::size_t count, Rng& rng) const override {
    return sample_prior(count, rng);
  }
  double log_likelihood(const Dataset& d, std::span<const double> phi) const override {
    return phi[0] == d.scalar("phi") ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  std::vector<double> summarize(const Dataset& d) const override { return {d.scalar("phi")}; }
};

// p ~ Beta(1, 1), n Bernoulli(p) trials.
class BetaBinomialModel final : public DecisionModel {
 public:
  std::string name() const override { return "beta_binomial"; }
  std::size_t arms() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"p"}; }
  std::vector<std::size_t> focal() const override { return {0}; }
  PsaSet sample_prior(std::size_t count, Rng& rng) const override { return draw(count, 1.0, 1.0, rng); }
  std::vector<double> net_benefit(std::span<const double> t, double) const override { return {0.0, t[0] - 0.5}; }
  Dataset sample_data(std::span<const double> phi, const StudyDesign& d, Rng& rng) const override {
    Dataset data{d, {}};
    data.arrays["x"] = {static_cast<double>(rng.binomial(static_cast<long>(d.n), phi[0]))};
    return data;
  }
  PsaSet posterior_sample(const Dataset& d, std::size_t count, Rng& rng) const override {
    if (d.empty()) return sample_prior(count, rng);
    const double x = d.scalar("x");
    return draw(count, 1.0 + x, 1.0 + static_cast<double>(d.design.n) - x, rng);
  }
  double log_likelihood(const Dataset& d, std::span<const double> phi) const override {
    const double x = d.scalar("x");
    return x * std::log(phi[0]) + (static_cast<double>(d.design.n) - x) * std::log1p(-phi[0]);
  }
  std::vector<double> summarize(const Dataset& d) const override { return {d.scalar("x")}; }

 private:
  PsaSet draw(std::size_t count, double a, double b, Rng& rng) const {
    Matrix m(static_cast<Eigen::Index>(count), 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, 0) = rng.beta(a, b);
    return PsaSet{m, parameter_names(), focal()};
  }
};

}  // namespace voi::testing
