#include "voi/bayes.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace voi::bayes {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double beta_log_density(double x, double alpha, double beta) {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  return (alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) - log_beta_fn(alpha, beta);
}

double normal_log_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double gamma_log_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double lognormal_log_density(double x, double meanlog, double sdlog) {
  if (!(x > 0.0)) return kNegInf;
  return normal_log_density(std::log(x), meanlog, sdlog) - std::log(x);
}

void PriorSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("PriorSpec: " + what); };
  switch (family) {
    case Family::beta:
      if (!(a > 0.0 && b > 0.0)) fail("beta parameters must be positive");
      break;
    case Family::normal:
      if (!(b > 0.0)) fail("normal precision must be positive");
      break;
    case Family::lognormal:
      if (!(b > 0.0)) fail("lognormal sdlog must be positive");
      break;
    case Family::gamma:
      if (!(a > 0.0 && b > 0.0)) fail("gamma shape and rate must be positive");
      break;
    case Family::uniform:
      if (!(a < b)) fail("uniform needs lo < hi");
      break;
  }
}

double PriorSpec::sample(Rng& rng) const {
  switch (family) {
    case Family::beta: return rng.beta(a, b);
    case Family::normal: return rng.normal(a, 1.0 / std::sqrt(b));
    case Family::lognormal: return rng.lognormal(a, b);
    case Family::gamma: return rng.gamma(a, b);
    case Family::uniform: return a + (b - a) * rng.uniform();
  }
  return 0.0;
}

double PriorSpec::log_density(double x) const {
  switch (family) {
    case Family::beta: return beta_log_density(x, a, b);
    case Family::normal: return normal_log_density(x, a, 1.0 / std::sqrt(b));
    case Family::lognormal: return lognormal_log_density(x, a, b);
    case Family::gamma: return gamma_log_density(x, a, b);
    case Family::uniform: return (x >= a && x <= b) ? -std::log(b - a) : kNegInf;
  }
  return kNegInf;
}

double PriorSpec::mean() const {
  switch (family) {
    case Family::beta: return a / (a + b);
    case Family::normal: return a;
    case Family::lognormal: return std::exp(a + 0.5 * b * b);
    case Family::gamma: return a / b;
    case Family::uniform: return 0.5 * (a + b);
  }
  return 0.0;
}

double PriorSpec::variance() const {
  switch (family) {
    case Family::beta: return BetaDist{a, b}.variance();
    case Family::normal: return 1.0 / b;
    case Family::lognormal: return (std::exp(b * b) - 1.0) * std::exp(2.0 * a + b * b);
    case Family::gamma: return a / (b * b);
    case Family::uniform: return (b - a) * (b - a) / 12.0;
  }
  return 0.0;
}

BetaDist conjugate_beta_binomial(const BetaDist& prior, long successes, long trials) {
  if (successes < 0 || trials < 0 || successes > trials)
    throw std::invalid_argument("conjugate_beta_binomial: need 0 <= successes <= trials");
  return {prior.alpha + static_cast<double>(successes),
          prior.beta + static_cast<double>(trials - successes)};
}

BetaDist moment_to_beta(double mean, double sd) {
  if (!(mean > 0.0 && mean < 1.0)) throw std::invalid_argument("moment_to_beta: mean must lie in (0,1)");
  if (!(sd > 0.0)) throw std::invalid_argument("moment_to_beta: sd must be positive");
  const double bound = mean * (1.0 - mean);
  if (!(sd * sd < bound)) {
    std::ostringstream msg;
    msg << "moment_to_beta: sd " << sd << " infeasible for mean " << mean << " (sd^2 = " << sd * sd
        << " >= mean(1-mean) = " << bound << ")";
    throw std::invalid_argument(msg.str());
  }
  const double nu = bound / (sd * sd) - 1.0;
  return {mean * nu, (1.0 - mean) * nu};
}

std::pair<double, double> moment_to_gamma(double mean, double sd) {
  if (!(mean > 0.0 && sd > 0.0)) throw std::invalid_argument("moment_to_gamma: mean and sd must be positive");
  return {(mean / sd) * (mean / sd), mean / (sd * sd)};
}

void MhConfig::validate() const {
  if (!(steps > burn_in)) throw std::invalid_argument("MhConfig: steps must exceed burn-in");
  if (thin == 0) throw std::invalid_argument("MhConfig: thinning must be >= 1");
  if (target_acceptance != 0.0 && !(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw std::invalid_argument("MhConfig: target acceptance must lie in (0,1)");
  for (double sd : proposal_sd)
    if (!(sd > 0.0)) throw std::invalid_argument("MhConfig: proposal sd must be positive");
}

MhResult mh_sample(const LogTarget& log_target, std::span<const double> init,
                   const MhConfig& config, Rng& rng) {
  config.validate();
  const std::size_t dims = init.size();
  if (dims == 0) throw std::invalid_argument("mh_sample: empty initial state");
  if (!config.proposal_sd.empty() && config.proposal_sd.size() != dims)
    throw std::invalid_argument("mh_sample: proposal sd size does not match dimension");

  std::vector<double> x(init.begin(), init.end());
  double lp = log_target(x);
  if (!std::isfinite(lp)) throw std::invalid_argument("mh_sample: log target is not finite at init");

  std::vector<double> log_sd(dims, 0.0);
  for (std::size_t d = 0; d < config.proposal_sd.size(); ++d) log_sd[d] = std::log(config.proposal_sd[d]);
  const double target = config.target_acceptance > 0.0 ? config.target_acceptance
                        : dims == 1                   ? 0.44
                                                      : 0.234;

  constexpr std::size_t kBatch = 25;
  std::vector<std::size_t> batch_accepts(dims, 0), kept_accepts(dims, 0);
  std::size_t batches = 0;

  MhResult result;
  result.chain.resize(static_cast<Eigen::Index>(config.kept()), static_cast<Eigen::Index>(dims));
  Eigen::Index row = 0;

  for (std::size_t it = 0; it < config.steps; ++it) {
    const bool burning = it < config.burn_in;
    for (std::size_t d = 0; d < dims; ++d) {
      const double old = x[d];
      x[d] = old + std::exp(log_sd[d]) * rng.normal();
      const double cand = log_target(x);
      if (std::isfinite(cand) && std::log(rng.uniform()) < cand - lp) {
        lp = cand;
        ++(burning ? batch_accepts[d] : kept_accepts[d]);
      } else {
        x[d] = old;
      }
    }
    if (burning && (it + 1) % kBatch == 0) {
      ++batches;
      const double step = 3.0 / std::sqrt(static_cast<double>(batches));
      for (std::size_t d = 0; d < dims; ++d) {
        const double rate = static_cast<double>(batch_accepts[d]) / kBatch;
        log_sd[d] += step * (rate - target);
        batch_accepts[d] = 0;
      }
    }
    if (!burning && (it - config.burn_in) % config.thin == 0) {
      for (std::size_t d = 0; d < dims; ++d) result.chain(row, static_cast<Eigen::Index>(d)) = x[d];
      ++row;
    }
  }

  const double post = static_cast<double>(config.steps - config.burn_in);
  for (std::size_t d = 0; d < dims; ++d) {
    const double rate = static_cast<double>(kept_accepts[d]) / post;
    result.acceptance.push_back(rate);
    result.proposal_sd.push_back(std::exp(log_sd[d]));
    if (rate < 0.05 || rate > 0.95) {
      std::ostringstream msg;
      msg << "MH acceptance rate " << rate << " in dimension " << d << " outside [0.05, 0.95]";
      result.warnings.push_back(msg.str());
    }
    if (config.compute_ess) {
      std::vector<double> column(static_cast<std::size_t>(result.chain.rows()));
      for (Eigen::Index r = 0; r < result.chain.rows(); ++r)
        column[static_cast<std::size_t>(r)] = result.chain(r, static_cast<Eigen::Index>(d));
      result.ess.push_back(effective_sample_size(column));
    }
  }
  return result;
}

MhResult mh_sample(const LogTarget& log_target, std::span<const double> init,
                   const MhConfig& config) {
  Rng rng{config.seed};
  return mh_sample(log_target, init, config, rng);
}

double effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  if (var <= 0.0) return static_cast<double>(n);

  auto autocorr = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / var;
  };
  // Sum consecutive pairs while they stay positive.
  double tau = -1.0;
  for (std::size_t lag = 0; lag + 1 < n / 2; lag += 2) {
    const double pair = autocorr(lag) + autocorr(lag + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

}  // namespace voi::bayes
