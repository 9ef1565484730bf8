#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "voi/core.hpp"

namespace voi {

enum class BasisKind { linear, spline };

struct CovariateBasis {
  BasisKind kind = BasisKind::spline;
  int degree = 3;
  // Interior knots, placed at covariate quantiles.
  int knots = 5;
};

/// Regression basis for fit_metamodel.
///
/// Every covariate is standardised, then expanded either linearly or as a
/// truncated-power spline: polynomial columns z..z^d (unpenalised) plus
/// (z - knot)_+^d columns (ridge-penalised). Optional pairwise interactions
/// add unpenalised products of the two covariates' polynomial columns.
struct BasisSpec {
  // Per-covariate override; covariates past the end use `fallback`.
  std::vector<CovariateBasis> covariates;
  CovariateBasis fallback{};
  std::vector<std::pair<std::size_t, std::size_t>> interactions;
  std::size_t max_interactions = 10;

  // GCV grid: penalty on the mean-squared-error scale, log-spaced.
  std::size_t grid_points = 40;
  double penalty_min = 1e-8;
  double penalty_max = 1e4;

  CovariateBasis basis_for(std::size_t c) const {
    return c < covariates.size() ? covariates[c] : fallback;
  }
  static BasisSpec linear() {
    BasisSpec s;
    s.fallback = {BasisKind::linear, 1, 0};
    return s;
  }
  static BasisSpec spline(int degree = 3, int knots = 5) {
    BasisSpec s;
    s.fallback = {BasisKind::spline, degree, knots};
    return s;
  }
};

/// One additive block of the meta-model: a single covariate's basis columns
/// or one interaction.
struct MetaModelTerm {
  std::string label;
  std::vector<std::size_t> covariates;
  Eigen::Index first_column = 0;
  Eigen::Index columns = 0;
};

struct MetaModelFit {
  Vector coefficients;  // column 0 is the intercept
  Vector fitted;
  Vector residuals;
  double intercept = 0.0;
  double residual_sd = 0.0;
  double penalty = 0.0;
  double edf = 0.0;
  double gcv = 0.0;
  std::vector<std::string> column_labels;
  std::vector<MetaModelTerm> terms;
  // S x terms; column j is the fitted contribution of terms[j].
  Matrix term_contributions;
};

/// Penalised least-squares fit of response on a flexible basis of the
/// covariates, penalty chosen by generalised cross-validation.
///
/// Throws EstimatorError when the unpenalised part of the design is
/// rank-deficient (the message names the collinear columns) or when there are
/// not more observations than basis columns.
MetaModelFit fit_metamodel(const Vector& response, const Matrix& covariates, const BasisSpec& spec);

struct EvppiResult {
  double value = 0.0;
  double se = 0.0;
  Matrix mu_phi;  // S x (T-1) fitted conditional means
  std::vector<MetaModelFit> fits;
};

// Regression EVPPI: each INB column regressed on the focal columns of psa.
EvppiResult evppi_regression(const IncrementalNbTable& inb, const PsaSet& psa, const BasisSpec& spec);

}  // namespace voi
