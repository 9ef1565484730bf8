#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voi/core.hpp"
#include "voi/metamodel.hpp"

namespace voi {

using Summarizer = std::function<std::vector<double>(const Dataset&)>;

/// Regression-on-summary EVSI.
///
/// One dataset is simulated per PSA draw (from that draw's phi), reduced with
/// `summarizer` (model.summarize when empty) and every INB column is regressed
/// on the summaries. If `fits` is non-null it receives the per-column fits.
EvsiEstimate evsi_strong(const DecisionModel& model, const PsaSet& psa, const IncrementalNbTable& inb,
                         const StudyDesign& design, const BasisSpec& spec, Rng& rng,
                         const Summarizer& summarizer = {}, std::vector<MetaModelFit>* fits = nullptr);

struct MenziesOptions {
  // Reweighting pool size K (first K PSA rows); 0 uses every row.
  std::size_t pool = 0;
  // Number of simulated outer datasets; 0 uses the pool size.
  std::size_t datasets = 0;
  // Mean ESS below this fraction of the pool adds a degeneracy warning.
  double ess_warning_fraction = 0.05;
};

struct MenziesEstimate {
  EvsiEstimate estimate;
  std::vector<double> ess;  // per outer dataset, 1 / sum w^2
  double mean_ess = 0.0;
};

/// Likelihood-reweighting EVSI: mu^X_s is the likelihood-weighted average of
/// the pooled mu^phi values. The baseline is the uniformly weighted pool mean,
/// so an uninformative likelihood gives exactly zero.
MenziesEstimate evsi_menzies(const Matrix& mu_phi, const DecisionModel& model, const PsaSet& psa,
                             const StudyDesign& design, const MenziesOptions& options, Rng& rng);

enum class N0Route { analytic, summary, nested };

struct N0Estimate {
  std::vector<double> n0;  // one per focal component
  N0Route route = N0Route::nested;
  std::vector<std::string> warnings;
};

/// Prior effective sample size from the spread of posterior means: for
/// `outer` prior draws a dataset of size probe_n is simulated and `inner`
/// posterior draws give the posterior mean of each phi component.
N0Estimate estimate_n0_nested(const DecisionModel& model, std::size_t probe_n, std::size_t outer,
                              std::size_t inner, Rng& rng);

/// N0 = E_phi[per-observation variance of the summary] / prior variance, per
/// component. Prior variances default to the sample variances of the focal
/// columns in psa.
N0Estimate estimate_n0_summary(const PsaSet& psa,
                               const std::function<std::vector<double>(std::span<const double>)>& per_obs_variance,
                               std::optional<std::vector<double>> prior_variance = std::nullopt);

/// Linear meta-model EVSI: each covariate term's deviations from its mean are
/// scaled by sqrt(n / (n + N0_j)), so the term variance shrinks by n/(n+N0_j).
/// Interaction terms use the largest N0 among their covariates.
EvsiEstimate evsi_jalal(const std::vector<MetaModelFit>& fits, const IncrementalNbTable& inb, double n,
                        const N0Estimate& n0);

struct HeathVariance {
  std::vector<double> sigma2;  // per INB column
  std::vector<std::string> warnings;
};

/// Preposterior variance of each INB column from Q nested updates at
/// quantiles of the first mu^phi column: var(INB) minus the mean posterior
/// variance. Negative results within 5% of var(INB) floor at zero with a
/// warning; larger ones throw EstimatorError.
HeathVariance heath_preposterior_variance(const DecisionModel& model, const PsaSet& psa,
                                          const IncrementalNbTable& inb, const Matrix& mu_phi,
                                          const StudyDesign& design, std::size_t quantiles,
                                          std::size_t inner, Rng& rng);

/// Moment-matching EVSI: mu^phi rescaled to variance sigma2_x per column.
EvsiEstimate evsi_heath(const Matrix& mu_phi, std::span<const double> sigma2_x, const IncrementalNbTable& inb);

/// sigma^2_X(n) = sigma2_max * n / (n + nu), one curve per INB column.
class HeathCurve {
 public:
  HeathCurve() = default;
  HeathCurve(std::vector<double> sigma2_max, std::vector<double> nu);
  static HeathCurve single_point(std::size_t n, std::vector<double> sigma2);

  std::vector<double> at(double n) const;
  const std::vector<double>& sigma2_max() const { return sigma2_max_; }
  const std::vector<double>& nu() const { return nu_; }
  std::vector<std::string> warnings;

 private:
  std::vector<double> sigma2_max_;
  std::vector<double> nu_;
  std::optional<std::size_t> point_n_;
};

/// One nested procedure spread over the n grid: the Q quantile datasets get
/// sample sizes log-spaced across the grid's range (in shuffled order) and the
/// shrinkage curve is fitted by least squares with sigma2_max capped at
/// var(mu^phi). A grid with a single distinct n reduces to
/// heath_preposterior_variance at that n.
HeathCurve heath_variance_across_n(const DecisionModel& model, const PsaSet& psa,
                                   const IncrementalNbTable& inb, const Matrix& mu_phi,
                                   std::span<const std::size_t> n_grid, std::size_t quantiles,
                                   std::size_t inner, Rng& rng);

using ReplicateFn = std::function<EvsiEstimate(Rng&)>;

/// Point value = mean of the runs, [lo, hi] = empirical 2.5% / 97.5%
/// quantiles, seconds = mean per run, warnings deduplicated in order. A single
/// run gets value +- 1.96 se as its interval.
EvsiEstimate combine_replicates(const std::vector<EvsiEstimate>& runs);

/// Reruns `estimator` `reps` times on independent streams and combines them.
EvsiEstimate estimate_with_uncertainty(const ReplicateFn& estimator, std::size_t reps, Rng& rng);

// Type-7 empirical quantile.
double empirical_quantile(std::vector<double> values, double p);

}  // namespace voi
