#include "voi/models/gaussian_toy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "voi/bayes.hpp"

namespace voi::models {

GaussianToy::GaussianToy(double mu0, double sigma0, double sigma) : mu0_{mu0}, sigma0_{sigma0}, sigma_{sigma} {
  if (!(sigma0 > 0.0 && sigma > 0.0)) throw std::invalid_argument("GaussianToy: sigma0 and sigma must be positive");
}

PsaSet GaussianToy::sample_prior(std::size_t count, Rng& rng) const {
  Matrix draws(static_cast<Eigen::Index>(count), 1);
  for (Eigen::Index s = 0; s < draws.rows(); ++s) draws(s, 0) = rng.normal(mu0_, sigma0_);
  return PsaSet{std::move(draws), parameter_names(), focal()};
}

std::vector<double> GaussianToy::net_benefit(std::span<const double> theta, double) const { return {0.0, theta[0]}; }

Dataset GaussianToy::sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const {
  Dataset data{design, {}};
  if (design.n == 0) return data;
  const double n = static_cast<double>(design.n);
  data.arrays["xbar"] = {rng.normal(phi[0], sigma_ / std::sqrt(n))};
  return data;
}

PsaSet GaussianToy::posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const {
  if (data.empty()) return sample_prior(count, rng);
  const double n = static_cast<double>(data.design.n);
  const double precision = 1.0 / (sigma0_ * sigma0_) + n / (sigma_ * sigma_);
  const double mean = (mu0_ / (sigma0_ * sigma0_) + n * data.scalar("xbar") / (sigma_ * sigma_)) / precision;
  Matrix draws(static_cast<Eigen::Index>(count), 1);
  for (Eigen::Index s = 0; s < draws.rows(); ++s) draws(s, 0) = rng.normal(mean, 1.0 / std::sqrt(precision));
  return PsaSet{std::move(draws), parameter_names(), focal()};
}

double GaussianToy::log_likelihood(const Dataset& data, std::span<const double> phi) const {
  if (data.empty()) return 0.0;
  const double n = static_cast<double>(data.design.n);
  return bayes::normal_log_density(data.scalar("xbar"), phi[0], sigma_ / std::sqrt(n));
}

std::vector<double> GaussianToy::summarize(const Dataset& data) const {
  if (data.empty()) return {mu0_};
  return {data.scalar("xbar")};
}

double unit_normal_loss(double u) {
  const double density = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  const double upper_tail = 0.5 * std::erfc(u / std::numbers::sqrt2);
  return density - u * upper_tail;
}

double gaussian_toy_evsi_analytic(double mu0, double sigma0, double sigma, double n) {
  if (n < 0.0) throw std::invalid_argument("gaussian_toy_evsi_analytic: negative n");
  if (n == 0.0) return 0.0;
  const double n0 = sigma * sigma / (sigma0 * sigma0);
  const double sigma_m = sigma0 * std::sqrt(n / (n + n0));
  return sigma_m * unit_normal_loss(std::abs(mu0) / sigma_m);
}

}  // namespace voi::models
