#pragma once

#include "voi/core.hpp"

namespace voi::models {

/// Conjugate normal toy with a closed-form EVSI.
///
/// theta ~ Normal(mu0, sigma0^2), NB = (0, theta). A study of n observations
/// with known sd sigma is summarised by its mean, Xbar ~ Normal(theta, sigma^2/n).
class GaussianToy final : public DecisionModel {
 public:
  GaussianToy(double mu0, double sigma0, double sigma);

  std::string name() const override { return "gaussian_toy"; }
  std::size_t arms() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"theta"}; }
  std::vector<std::size_t> focal() const override { return {0}; }

  PsaSet sample_prior(std::size_t count, Rng& rng) const override;
  std::vector<double> net_benefit(std::span<const double> theta, double wtp) const override;
  Dataset sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const override;
  PsaSet posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const override;
  double log_likelihood(const Dataset& data, std::span<const double> phi) const override;
  std::vector<double> summarize(const Dataset& data) const override;

  double mu0() const { return mu0_; }
  double sigma0() const { return sigma0_; }
  double sigma() const { return sigma_; }

 private:
  double mu0_, sigma0_, sigma_;
};

// Unit normal loss: phi(u) - u * Phi(-u).
double unit_normal_loss(double u);

/// sigma_m * L(|mu0| / sigma_m) with sigma_m = sigma0 * sqrt(n / (n + sigma^2/sigma0^2)).
double gaussian_toy_evsi_analytic(double mu0, double sigma0, double sigma, double n);

}  // namespace voi::models
