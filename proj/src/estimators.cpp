#include "voi/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "voi/parallel.hpp"

namespace voi {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double sample_variance(const Vector& x) {
  if (x.size() < 2) return 0.0;
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

EvsiEstimate make_estimate(Method method, std::size_t n, double value, double se) {
  EvsiEstimate e;
  e.method = method;
  e.n = n;
  e.value = value;
  e.lo = e.hi = value;
  e.se = se;
  return e;
}

// Posterior sample of INB for one simulated dataset.
Matrix posterior_inb(const DecisionModel& model, const Dataset& data, std::size_t inner, double wtp, Rng& rng) {
  const PsaSet post = model.posterior_sample(data, inner, rng);
  return incremental(compute_nb_table(model, post, wtp)).values;
}

Vector column_variances(const Matrix& m) {
  Vector out(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) out(c) = sample_variance(m.col(c));
  return out;
}

}  // namespace

EvsiEstimate evsi_strong(const DecisionModel& model, const PsaSet& psa, const IncrementalNbTable& inb,
                         const StudyDesign& design, const BasisSpec& spec, Rng& rng,
                         const Summarizer& summarizer, std::vector<MetaModelFit>* fits) {
  if (inb.size() != psa.size()) throw std::invalid_argument("evsi_strong: INB and PSA sizes differ");
  const auto start = Clock::now();
  const Rng streams = rng.fork();
  const std::size_t rows = psa.size();

  std::vector<std::vector<double>> summaries(rows);
  parallel_for(rows, [&](std::size_t s) {
    Rng r = streams.stream(s);
    const Dataset data = model.sample_data(psa.focal_row(s), design, r);
    summaries[s] = summarizer ? summarizer(data) : model.summarize(data);
  });

  const std::size_t width = summaries.front().size();
  Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  for (std::size_t s = 0; s < rows; ++s) {
    if (summaries[s].size() != width) throw EstimatorError("evsi_strong: summary length changed at dataset " + std::to_string(s));
    for (std::size_t j = 0; j < width; ++j) {
      if (!std::isfinite(summaries[s][j]))
        throw EstimatorError("evsi_strong: non-finite summary component " + std::to_string(j) + " for dataset " +
                             std::to_string(s));
      x(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = summaries[s][j];
    }
  }

  // Constant summary components (e.g. every dataset empty) carry no information.
  std::vector<Eigen::Index> varying;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (x.col(j).maxCoeff() > x.col(j).minCoeff()) varying.push_back(j);

  Matrix mu(inb.values.rows(), inb.values.cols());
  std::vector<MetaModelFit> local;
  if (varying.empty()) {
    mu.rowwise() = inb.values.colwise().mean();
  } else {
    Matrix used(x.rows(), static_cast<Eigen::Index>(varying.size()));
    for (std::size_t j = 0; j < varying.size(); ++j) used.col(static_cast<Eigen::Index>(j)) = x.col(varying[j]);
    BasisSpec reduced = spec;
    if (varying.size() != width) {
      // Interactions and per-covariate bases refer to the original columns.
      std::vector<Eigen::Index> new_index(width, -1);
      for (std::size_t j = 0; j < varying.size(); ++j) new_index[static_cast<std::size_t>(varying[j])] = static_cast<Eigen::Index>(j);
      reduced.interactions.clear();
      for (auto [a, b] : spec.interactions)
        if (a < width && b < width && new_index[a] >= 0 && new_index[b] >= 0)
          reduced.interactions.emplace_back(new_index[a], new_index[b]);
      reduced.covariates.clear();
      for (auto j : varying) reduced.covariates.push_back(spec.basis_for(static_cast<std::size_t>(j)));
    }
    for (Eigen::Index t = 0; t < inb.values.cols(); ++t) {
      local.push_back(fit_metamodel(inb.values.col(t), used, reduced));
      mu.col(t) = local.back().fitted;
    }
  }
  auto est = make_estimate(Method::strong, design.n, mean_max0(mu) - max0_of_means(inb.values),
                           gain_standard_error(mu, inb.values));
  if (fits) *fits = std::move(local);
  est.seconds = seconds_since(start);
  return est;
}

MenziesEstimate evsi_menzies(const Matrix& mu_phi, const DecisionModel& model, const PsaSet& psa,
                             const StudyDesign& design, const MenziesOptions& options, Rng& rng) {
  if (static_cast<std::size_t>(mu_phi.rows()) != psa.size())
    throw std::invalid_argument("evsi_menzies: mu_phi and PSA sizes differ");
  const std::size_t pool = options.pool ? options.pool : psa.size();
  const std::size_t outer = options.datasets ? options.datasets : pool;
  if (pool > psa.size() || outer > psa.size()) throw std::invalid_argument("evsi_menzies: pool or dataset count exceeds PSA size");
  const auto start = Clock::now();
  const Rng streams = rng.fork();

  std::vector<std::vector<double>> phis(pool);
  for (std::size_t k = 0; k < pool; ++k) phis[k] = psa.focal_row(k);
  const Matrix pool_mu = mu_phi.topRows(static_cast<Eigen::Index>(pool));

  auto weighted_mean = [&](const std::vector<double>& weights) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(pool_mu.cols());
    for (std::size_t k = 0; k < pool; ++k) acc += weights[k] * pool_mu.row(static_cast<Eigen::Index>(k));
    return acc;
  };
  // Normalises exp(loglik - max) in place; returns 1 / sum w^2.
  auto normalise = [](std::vector<double>& w) {
    const double top = *std::max_element(w.begin(), w.end());
    if (!std::isfinite(top)) return -1.0;
    double total = 0.0;
    for (double& v : w) total += (v = std::exp(v - top));
    double sq = 0.0;
    for (double& v : w) {
      v /= total;
      sq += v * v;
    }
    return 1.0 / sq;
  };

  Matrix mu_x(static_cast<Eigen::Index>(outer), pool_mu.cols());
  MenziesEstimate out;
  out.ess.assign(outer, 0.0);
  parallel_for(outer, [&](std::size_t s) {
    Rng r = streams.stream(s);
    const Dataset data = model.sample_data(phis.size() > s ? phis[s] : psa.focal_row(s), design, r);
    std::vector<double> w(pool);
    for (std::size_t k = 0; k < pool; ++k) w[k] = model.log_likelihood(data, phis[k]);
    const double ess = normalise(w);
    if (ess < 0.0) throw EstimatorError("evsi_menzies: all likelihood weights are zero for dataset " + std::to_string(s));
    out.ess[s] = ess;
    mu_x.row(static_cast<Eigen::Index>(s)) = weighted_mean(w);
  });

  std::vector<double> uniform(pool, 0.0);
  normalise(uniform);
  const Eigen::RowVectorXd prior_mean = weighted_mean(uniform);
  const double baseline = std::max(0.0, prior_mean.maxCoeff());

  // Differences first, so an uninformative likelihood cancels exactly.
  double gain = 0.0;
  for (Eigen::Index s = 0; s < mu_x.rows(); ++s) gain += std::max(0.0, mu_x.row(s).maxCoeff()) - baseline;
  gain /= static_cast<double>(mu_x.rows());
  out.estimate = make_estimate(Method::menzies, design.n, gain,
                               gain_standard_error(mu_x, pool_mu));
  out.mean_ess = std::accumulate(out.ess.begin(), out.ess.end(), 0.0) / static_cast<double>(outer);
  if (out.mean_ess < options.ess_warning_fraction * static_cast<double>(pool)) {
    std::ostringstream msg;
    msg << "menzies: importance weights degenerate at n=" << design.n << " (mean ESS " << out.mean_ess << " of pool "
        << pool << ", below " << options.ess_warning_fraction * 100.0 << "%)";
    out.estimate.warnings.push_back(msg.str());
  }
  out.estimate.seconds = seconds_since(start);
  return out;
}

N0Estimate estimate_n0_nested(const DecisionModel& model, std::size_t probe_n, std::size_t outer,
                              std::size_t inner, Rng& rng) {
  if (probe_n == 0 || outer < 2 || inner < 2) throw std::invalid_argument("estimate_n0_nested: need probe_n >= 1, outer >= 2, inner >= 2");
  Rng prior_rng = rng.fork();
  const Rng streams = rng.fork();
  const PsaSet prior = model.sample_prior(outer, prior_rng);
  const auto& focal = prior.focal();
  const StudyDesign design = model.design(probe_n);

  Matrix post_means(static_cast<Eigen::Index>(outer), static_cast<Eigen::Index>(focal.size()));
  parallel_for(outer, [&](std::size_t s) {
    Rng r = streams.stream(s);
    const Dataset data = model.sample_data(prior.focal_row(s), design, r);
    const PsaSet post = model.posterior_sample(data, inner, r);
    post_means.row(static_cast<Eigen::Index>(s)) = post.focal_draws().colwise().mean();
  });

  N0Estimate est;
  est.route = N0Route::nested;
  const Matrix phi = prior.focal_draws();
  constexpr double kFloor = 1e-6;
  constexpr double kCeiling = 1e12;
  for (std::size_t c = 0; c < focal.size(); ++c) {
    const double prior_var = sample_variance(phi.col(static_cast<Eigen::Index>(c)));
    const double v = sample_variance(post_means.col(static_cast<Eigen::Index>(c)));
    const std::string& label = prior.names()[focal[c]];
    double n0 = v > 0.0 ? static_cast<double>(probe_n) * (prior_var / v - 1.0) : kCeiling;
    if (!(n0 > kFloor)) {
      est.warnings.push_back("N0 for " + label + ": posterior means show no shrinkage; floored at " + std::to_string(kFloor));
      n0 = kFloor;
    } else if (n0 > kCeiling) {
      est.warnings.push_back("N0 for " + label + ": data carry no information; capped");
      n0 = kCeiling;
    }
    est.n0.push_back(n0);
  }
  return est;
}

N0Estimate estimate_n0_summary(const PsaSet& psa,
                               const std::function<std::vector<double>(std::span<const double>)>& per_obs_variance,
                               std::optional<std::vector<double>> prior_variance) {
  const auto components = psa.focal().size();
  std::vector<double> mean_var(components, 0.0);
  for (std::size_t s = 0; s < psa.size(); ++s) {
    const auto phi = psa.focal_row(s);
    const auto v = per_obs_variance(phi);
    if (v.size() != components) throw std::invalid_argument("estimate_n0_summary: variance function returned wrong length");
    for (std::size_t c = 0; c < components; ++c) {
      if (!(v[c] > 0.0)) throw std::invalid_argument("estimate_n0_summary: non-positive per-observation variance");
      mean_var[c] += v[c] / static_cast<double>(psa.size());
    }
  }
  std::vector<double> pv;
  if (prior_variance) {
    pv = *prior_variance;
  } else {
    const Matrix phi = psa.focal_draws();
    for (std::size_t c = 0; c < components; ++c) pv.push_back(sample_variance(phi.col(static_cast<Eigen::Index>(c))));
  }
  if (pv.size() != components) throw std::invalid_argument("estimate_n0_summary: prior variance length mismatch");

  N0Estimate est;
  est.route = N0Route::summary;
  for (std::size_t c = 0; c < components; ++c) {
    if (!(pv[c] > 0.0)) throw std::invalid_argument("estimate_n0_summary: non-positive prior variance");
    est.n0.push_back(mean_var[c] / pv[c]);
  }
  return est;
}

EvsiEstimate evsi_jalal(const std::vector<MetaModelFit>& fits, const IncrementalNbTable& inb, double n,
                        const N0Estimate& n0) {
  if (n < 0.0) throw std::invalid_argument("evsi_jalal: negative sample size");
  if (fits.size() != inb.columns()) throw std::invalid_argument("evsi_jalal: one fit per INB column required");
  const auto start = Clock::now();

  Matrix mu(inb.values.rows(), inb.values.cols());
  for (std::size_t t = 0; t < fits.size(); ++t) {
    const auto& fit = fits[t];
    Vector col = Vector::Constant(inb.values.rows(), fit.intercept);
    for (std::size_t j = 0; j < fit.terms.size(); ++j) {
      double term_n0 = 0.0;
      for (auto c : fit.terms[j].covariates) {
        if (c >= n0.n0.size()) throw std::invalid_argument("evsi_jalal: missing N0 for covariate " + std::to_string(c));
        term_n0 = std::max(term_n0, n0.n0[c]);
      }
      const double scale = n + term_n0 > 0.0 ? std::sqrt(n / (n + term_n0)) : 0.0;
      const auto contribution = fit.term_contributions.col(static_cast<Eigen::Index>(j));
      const double centre = contribution.mean();
      col.array() += centre + scale * (contribution.array() - centre);
    }
    mu.col(static_cast<Eigen::Index>(t)) = col;
  }
  auto est = make_estimate(Method::jalal, static_cast<std::size_t>(n), mean_max0(mu) - max0_of_means(inb.values),
                           gain_standard_error(mu, inb.values));
  est.warnings = n0.warnings;
  est.seconds = seconds_since(start);
  return est;
}

namespace {

std::vector<std::size_t> quantile_rows(const Matrix& mu_phi, std::size_t quantiles) {
  const auto rows = static_cast<std::size_t>(mu_phi.rows());
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mu_phi(static_cast<Eigen::Index>(a), 0) < mu_phi(static_cast<Eigen::Index>(b), 0); });
  std::vector<std::size_t> picked;
  for (std::size_t q = 1; q <= quantiles; ++q) {
    const double p = (2.0 * static_cast<double>(q) - 1.0) / (2.0 * static_cast<double>(quantiles));
    picked.push_back(order[std::min(rows - 1, static_cast<std::size_t>(p * static_cast<double>(rows)))]);
  }
  return picked;
}

}  // namespace

HeathVariance heath_preposterior_variance(const DecisionModel& model, const PsaSet& psa,
                                          const IncrementalNbTable& inb, const Matrix& mu_phi,
                                          const StudyDesign& design, std::size_t quantiles,
                                          std::size_t inner, Rng& rng) {
  if (quantiles < 2 || inner < 2) throw std::invalid_argument("heath_preposterior_variance: need Q >= 2 and R >= 2");
  if (static_cast<std::size_t>(mu_phi.rows()) != psa.size() || inb.size() != psa.size())
    throw std::invalid_argument("heath_preposterior_variance: size mismatch");
  // No data leaves every posterior equal to the prior.
  if (design.n == 0) return {std::vector<double>(static_cast<std::size_t>(inb.values.cols()), 0.0), {}};
  const Rng streams = rng.fork();
  const auto rows = quantile_rows(mu_phi, quantiles);

  Matrix post_var(static_cast<Eigen::Index>(quantiles), inb.values.cols());
  parallel_for(quantiles, [&](std::size_t q) {
    Rng r = streams.stream(q);
    const Dataset data = model.sample_data(psa.focal_row(rows[q]), design, r);
    post_var.row(static_cast<Eigen::Index>(q)) = column_variances(posterior_inb(model, data, inner, inb.wtp, r)).transpose();
  });

  HeathVariance out;
  const Vector prior_var = column_variances(inb.values);
  for (Eigen::Index c = 0; c < inb.values.cols(); ++c) {
    double s2 = prior_var(c) - post_var.col(c).mean();
    if (s2 < 0.0) {
      if (-s2 > 0.05 * prior_var(c)) {
        std::ostringstream msg;
        msg << "heath: preposterior variance " << s2 << " for column " << c
            << " is negative beyond tolerance; increase Q or R";
        throw EstimatorError(msg.str());
      }
      out.warnings.push_back("heath: preposterior variance for column " + std::to_string(c) + " floored at 0");
      s2 = 0.0;
    }
    out.sigma2.push_back(s2);
  }
  return out;
}

EvsiEstimate evsi_heath(const Matrix& mu_phi, std::span<const double> sigma2_x, const IncrementalNbTable& inb) {
  if (sigma2_x.size() != static_cast<std::size_t>(mu_phi.cols()) || mu_phi.cols() != inb.values.cols())
    throw std::invalid_argument("evsi_heath: column count mismatch");
  const auto start = Clock::now();
  Matrix mu(mu_phi.rows(), mu_phi.cols());
  std::vector<std::string> warnings;
  for (Eigen::Index c = 0; c < mu_phi.cols(); ++c) {
    const double var_phi = sample_variance(mu_phi.col(c));
    double s2 = sigma2_x[static_cast<std::size_t>(c)];
    if (s2 < 0.0) throw std::invalid_argument("evsi_heath: negative preposterior variance");
    if (var_phi <= 0.0) {
      if (s2 > 0.0) throw EstimatorError("evsi_heath: mu^phi has zero variance but sigma^2_X > 0");
      mu.col(c) = mu_phi.col(c);
      continue;
    }
    if (s2 > var_phi) {
      if (s2 > 1.05 * var_phi)
        warnings.push_back("heath: sigma^2_X exceeds var(mu^phi) for column " + std::to_string(c) + "; capped");
      s2 = var_phi;
    }
    const double centre = mu_phi.col(c).mean();
    mu.col(c) = (centre + std::sqrt(s2 / var_phi) * (mu_phi.col(c).array() - centre)).matrix();
  }
  auto est = make_estimate(Method::heath, 0, mean_max0(mu) - max0_of_means(inb.values),
                           gain_standard_error(mu, inb.values));
  est.warnings = std::move(warnings);
  est.seconds = seconds_since(start);
  return est;
}

HeathCurve::HeathCurve(std::vector<double> sigma2_max, std::vector<double> nu)
    : sigma2_max_{std::move(sigma2_max)}, nu_{std::move(nu)} {
  if (sigma2_max_.size() != nu_.size()) throw std::invalid_argument("HeathCurve: size mismatch");
}

HeathCurve HeathCurve::single_point(std::size_t n, std::vector<double> sigma2) {
  HeathCurve curve;
  curve.sigma2_max_ = std::move(sigma2);
  curve.nu_.assign(curve.sigma2_max_.size(), 0.0);
  curve.point_n_ = n;
  return curve;
}

std::vector<double> HeathCurve::at(double n) const {
  if (n < 0.0) throw std::invalid_argument("HeathCurve: negative sample size");
  if (point_n_) {
    if (n != static_cast<double>(*point_n_))
      throw std::invalid_argument("HeathCurve: fitted at a single n = " + std::to_string(*point_n_));
    return sigma2_max_;
  }
  std::vector<double> out;
  for (std::size_t c = 0; c < nu_.size(); ++c) out.push_back(n > 0.0 ? sigma2_max_[c] * n / (n + nu_[c]) : 0.0);
  return out;
}

namespace {

// Least-squares fit of y = a * n / (n + nu) with a clipped to [0, cap].
std::pair<double, double> fit_shrinkage_curve(const std::vector<double>& n, const std::vector<double>& y, double cap) {
  const auto sse_at = [&](double log_nu, double* a_out) {
    const double nu = std::exp(log_nu);
    double gy = 0.0, gg = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double g = n[i] / (n[i] + nu);
      gy += g * y[i];
      gg += g * g;
    }
    const double a = std::clamp(gg > 0.0 ? gy / gg : 0.0, 0.0, cap);
    double sse = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double r = y[i] - a * n[i] / (n[i] + nu);
      sse += r * r;
    }
    if (a_out) *a_out = a;
    return sse;
  };
  const double lo = std::log(1e-3 * *std::min_element(n.begin(), n.end()));
  const double hi = std::log(1e3 * *std::max_element(n.begin(), n.end()));
  constexpr int kGrid = 200;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= kGrid; ++g) {
    const double sse = sse_at(lo + (hi - lo) * g / kGrid, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best = g;
    }
  }
  // Golden-section refinement between the neighbouring grid points.
  double a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
  double b = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double c = b - ratio * (b - a);
    const double d = a + ratio * (b - a);
    if (sse_at(c, nullptr) < sse_at(d, nullptr)) b = d;
    else a = c;
  }
  double amp = 0.0;
  const double log_nu = 0.5 * (a + b);
  sse_at(log_nu, &amp);
  return {amp, std::exp(log_nu)};
}

}  // namespace

HeathCurve heath_variance_across_n(const DecisionModel& model, const PsaSet& psa,
                                   const IncrementalNbTable& inb, const Matrix& mu_phi,
                                   std::span<const std::size_t> n_grid, std::size_t quantiles,
                                   std::size_t inner, Rng& rng) {
  if (n_grid.empty()) throw std::invalid_argument("heath_variance_across_n: empty n grid");
  const std::set<std::size_t> distinct(n_grid.begin(), n_grid.end());
  if (distinct.size() == 1) {
    const std::size_t n = *distinct.begin();
    auto var = heath_preposterior_variance(model, psa, inb, mu_phi, model.design(n), quantiles, inner, rng);
    auto curve = HeathCurve::single_point(n, var.sigma2);
    curve.warnings = std::move(var.warnings);
    return curve;
  }
  if (quantiles < 3 || inner < 2) throw std::invalid_argument("heath_variance_across_n: need Q >= 3 and R >= 2");

  const double n_min = std::max<double>(1.0, static_cast<double>(*distinct.begin()));
  const double n_max = static_cast<double>(*distinct.rbegin());
  std::vector<std::size_t> sizes(quantiles);
  for (std::size_t q = 0; q < quantiles; ++q) {
    const double frac = static_cast<double>(q) / static_cast<double>(quantiles - 1);
    sizes[q] = static_cast<std::size_t>(std::llround(std::exp(std::log(n_min) + frac * (std::log(n_max) - std::log(n_min)))));
  }
  if (std::set<std::size_t>(sizes.begin(), sizes.end()).size() < 3)
    throw EstimatorError("heath_variance_across_n: fewer than 3 distinct sample sizes across the quantiles");
  std::shuffle(sizes.begin(), sizes.end(), rng.engine());

  const Rng streams = rng.fork();
  const auto rows = quantile_rows(mu_phi, quantiles);
  Matrix post_var(static_cast<Eigen::Index>(quantiles), inb.values.cols());
  parallel_for(quantiles, [&](std::size_t q) {
    Rng r = streams.stream(q);
    const Dataset data = model.sample_data(psa.focal_row(rows[q]), model.design(sizes[q]), r);
    post_var.row(static_cast<Eigen::Index>(q)) = column_variances(posterior_inb(model, data, inner, inb.wtp, r)).transpose();
  });

  const Vector prior_var = column_variances(inb.values);
  const Vector phi_var = column_variances(mu_phi);
  std::vector<double> amp, nu;
  std::vector<double> n_values(sizes.begin(), sizes.end());
  for (Eigen::Index c = 0; c < inb.values.cols(); ++c) {
    std::vector<double> y(quantiles);
    for (std::size_t q = 0; q < quantiles; ++q) y[q] = prior_var(c) - post_var(static_cast<Eigen::Index>(q), c);
    const auto [a, v] = fit_shrinkage_curve(n_values, y, phi_var(c));
    if (!std::isfinite(a) || !std::isfinite(v)) throw EstimatorError("heath_variance_across_n: curve fit failed");
    amp.push_back(a);
    nu.push_back(v);
  }
  return HeathCurve{std::move(amp), std::move(nu)};
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

EvsiEstimate combine_replicates(const std::vector<EvsiEstimate>& runs) {
  if (runs.empty()) throw std::invalid_argument("combine_replicates: no runs");
  const std::size_t reps = runs.size();
  std::vector<double> values;
  double se = 0.0, seconds = 0.0;
  for (const auto& r : runs) {
    values.push_back(r.value);
    se += r.se / static_cast<double>(reps);
    seconds += r.seconds / static_cast<double>(reps);
  }
  EvsiEstimate out = runs.front();
  out.value = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(reps);
  out.se = se;
  out.seconds = seconds;
  out.replicates = reps;
  if (reps == 1) {
    out.lo = out.value - 1.96 * se;
    out.hi = out.value + 1.96 * se;
    out.replicate_sd = 0.0;
  } else {
    out.lo = empirical_quantile(values, 0.025);
    out.hi = empirical_quantile(values, 0.975);
    double ss = 0.0;
    for (double v : values) ss += (v - out.value) * (v - out.value);
    out.replicate_sd = std::sqrt(ss / static_cast<double>(reps - 1));
  }
  out.warnings.clear();
  std::set<std::string> seen;
  for (const auto& r : runs)
    for (const auto& w : r.warnings)
      if (seen.insert(w).second) out.warnings.push_back(w);
  return out;
}

EvsiEstimate estimate_with_uncertainty(const ReplicateFn& estimator, std::size_t reps, Rng& rng) {
  if (reps < 2) throw std::invalid_argument("estimate_with_uncertainty: need at least 2 replicates");
  const Rng streams = rng.fork();
  std::vector<EvsiEstimate> runs(reps);
  parallel_for(reps, [&](std::size_t i) {
    Rng r = streams.stream(i);
    runs[i] = estimator(r);
  });
  return combine_replicates(runs);
}

}  // namespace voi
