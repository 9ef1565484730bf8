#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "voi/core.hpp"
#include "voi/rng.hpp"

namespace voi::bayes {

struct BetaDist {
  double alpha = 1.0;
  double beta = 1.0;
  double mean() const { return alpha / (alpha + beta); }
  double variance() const {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }
};

enum class Family { beta, normal, lognormal, gamma, uniform };

/// A univariate prior.
///
/// Parameter meaning per family: beta(alpha, beta), normal(mean, precision),
/// lognormal(meanlog, sdlog), gamma(shape, rate), uniform(lo, hi). Normal
/// priors take a precision, matching the convention the chemotherapy inputs
/// are published in.
struct PriorSpec {
  Family family = Family::uniform;
  double a = 0.0;
  double b = 1.0;

  static PriorSpec make_beta(double alpha, double beta) { return {Family::beta, alpha, beta}; }
  static PriorSpec make_normal(double mean, double precision) { return {Family::normal, mean, precision}; }
  static PriorSpec make_lognormal(double meanlog, double sdlog) { return {Family::lognormal, meanlog, sdlog}; }
  static PriorSpec make_gamma(double shape, double rate) { return {Family::gamma, shape, rate}; }
  static PriorSpec make_uniform(double lo, double hi) { return {Family::uniform, lo, hi}; }

  // Throws std::invalid_argument on family-specific constraint violations.
  void validate() const;
  double sample(Rng& rng) const;
  double log_density(double x) const;
  double mean() const;
  double variance() const;
};

double beta_log_density(double x, double alpha, double beta);
double normal_log_density(double x, double mean, double sd);
double gamma_log_density(double x, double shape, double rate);
double lognormal_log_density(double x, double meanlog, double sdlog);

inline double logit(double p) { return std::log(p / (1.0 - p)); }
inline double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
// log |d p / d x| for p = inv_logit(x).
inline double log_jacobian_logit(double x) {
  const double p = inv_logit(x);
  return std::log(p) + std::log1p(-p);
}

BetaDist conjugate_beta_binomial(const BetaDist& prior, long successes, long trials);

// Beta with the given mean and standard deviation; throws if sd^2 >= mean(1-mean).
BetaDist moment_to_beta(double mean, double sd);

// Gamma (shape, rate) with the given mean and standard deviation.
std::pair<double, double> moment_to_gamma(double mean, double sd);

struct MhConfig {
  // Total iterations including burn-in.
  std::size_t steps = 2000;
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  // Initial proposal sd per dimension; empty means 1.0 everywhere.
  std::vector<double> proposal_sd;
  // 0 selects 0.44 for one dimension and 0.234 otherwise.
  double target_acceptance = 0.0;
  bool compute_ess = true;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t kept() const { return (steps - burn_in + thin - 1) / thin; }
};

struct MhResult {
  Matrix chain;  // kept draws x dimensions
  std::vector<double> acceptance;
  std::vector<double> ess;
  std::vector<double> proposal_sd;  // after adaptation
  std::vector<std::string> warnings;

  bool converged() const { return warnings.empty(); }
};

using LogTarget = std::function<double(std::span<const double>)>;

/// Componentwise random-walk Metropolis-Hastings with Gaussian proposals.
///
/// Proposal sds adapt in batches of 25 iterations during burn-in toward the
/// target acceptance rate and are frozen afterwards. A post-burn-in acceptance
/// rate outside [0.05, 0.95] in any dimension adds a warning. Throws
/// std::invalid_argument if `log_target(init)` is not finite.
MhResult mh_sample(const LogTarget& log_target, std::span<const double> init,
                   const MhConfig& config, Rng& rng);
MhResult mh_sample(const LogTarget& log_target, std::span<const double> init,
                   const MhConfig& config);

// Geyer initial-positive-sequence ESS of one chain.
double effective_sample_size(std::span<const double> x);

}  // namespace voi::bayes
