#include "voi/metamodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace voi {
namespace {

using ColMatrix = Eigen::MatrixXd;

struct Design {
  ColMatrix basis;
  std::vector<bool> penalized;
  std::vector<std::string> labels;
  std::vector<MetaModelTerm> terms;
};

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string covariate_label(std::size_t c) { return "x" + std::to_string(c + 1); }

Design build_design(const Matrix& x, const BasisSpec& spec) {
  const Eigen::Index rows = x.rows();
  const auto cov_count = static_cast<std::size_t>(x.cols());
  std::vector<Vector> columns;
  Design d;
  auto add = [&](Vector v, bool penalized, std::string label) {
    columns.push_back(std::move(v));
    d.penalized.push_back(penalized);
    d.labels.push_back(std::move(label));
  };

  add(Vector::Ones(rows), false, "intercept");
  // Polynomial columns per covariate, reused for interactions.
  std::vector<std::vector<Vector>> poly(cov_count);

  for (std::size_t c = 0; c < cov_count; ++c) {
    const auto basis = spec.basis_for(c);
    const std::string name = covariate_label(c);
    MetaModelTerm term{name, {c}, static_cast<Eigen::Index>(columns.size()), 0};
    const Vector raw = x.col(static_cast<Eigen::Index>(c));

    if (basis.kind == BasisKind::linear) {
      poly[c].push_back(raw);
      add(raw, false, name);
    } else {
      if (basis.degree < 1 || basis.degree > 3) throw std::invalid_argument("BasisSpec: spline degree must be 1, 2 or 3");
      if (basis.knots < 0) throw std::invalid_argument("BasisSpec: negative knot count");
      const double mean = raw.mean();
      double sd = std::sqrt((raw.array() - mean).square().mean());
      if (!(sd > 0.0)) sd = 1.0;
      const Vector z = (raw.array() - mean) / sd;

      for (int p = 1; p <= basis.degree; ++p) {
        Vector zp = z.array().pow(p);
        poly[c].push_back(zp);
        add(std::move(zp), false, p == 1 ? name : name + "^" + std::to_string(p));
      }

      std::vector<double> sorted(z.data(), z.data() + z.size());
      std::sort(sorted.begin(), sorted.end());
      double last_knot = -std::numeric_limits<double>::infinity();
      for (int k = 1; k <= basis.knots; ++k) {
        const double knot = quantile_sorted(sorted, static_cast<double>(k) / (basis.knots + 1));
        // Ties in discrete covariates collapse knots; a knot at the maximum gives a zero column.
        if (knot <= last_knot + 1e-12 || knot >= sorted.back()) continue;
        last_knot = knot;
        Vector tp = (z.array() - knot).max(0.0).pow(basis.degree);
        add(std::move(tp), true, name + ":knot" + std::to_string(k));
      }
    }
    term.columns = static_cast<Eigen::Index>(columns.size()) - term.first_column;
    d.terms.push_back(std::move(term));
  }

  if (spec.interactions.size() > spec.max_interactions)
    throw std::invalid_argument("BasisSpec: too many interactions");
  for (auto [i, j] : spec.interactions) {
    if (i >= cov_count || j >= cov_count || i == j)
      throw std::invalid_argument("BasisSpec: bad interaction pair");
    const std::string name = covariate_label(i) + "*" + covariate_label(j);
    MetaModelTerm term{name, {i, j}, static_cast<Eigen::Index>(columns.size()), 0};
    const std::size_t pi = std::min<std::size_t>(poly[i].size(), 2);
    const std::size_t pj = std::min<std::size_t>(poly[j].size(), 2);
    for (std::size_t a = 0; a < pi; ++a)
      for (std::size_t b = 0; b < pj; ++b)
        add(poly[i][a].cwiseProduct(poly[j][b]), false,
            name + "[" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "]");
    term.columns = static_cast<Eigen::Index>(columns.size()) - term.first_column;
    d.terms.push_back(std::move(term));
  }

  d.basis.resize(rows, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) d.basis.col(static_cast<Eigen::Index>(j)) = columns[j];
  return d;
}

void check_unpenalized_rank(const Design& d) {
  std::vector<Eigen::Index> idx;
  for (std::size_t j = 0; j < d.penalized.size(); ++j)
    if (!d.penalized[j]) idx.push_back(static_cast<Eigen::Index>(j));
  ColMatrix u(d.basis.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) u.col(static_cast<Eigen::Index>(j)) = d.basis.col(idx[j]);
  // Scale columns so the rank threshold is relative.
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const double norm = u.col(j).norm();
    if (norm > 0.0) u.col(j) /= norm;
  }
  Eigen::ColPivHouseholderQR<ColMatrix> qr(u);
  qr.setThreshold(1e-9);
  if (qr.rank() == u.cols()) return;
  std::ostringstream msg;
  msg << "fit_metamodel: rank-deficient design; collinear columns:";
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = qr.rank(); k < u.cols(); ++k)
    msg << " " << d.labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(perm(k))])];
  throw EstimatorError(msg.str());
}

}  // namespace

MetaModelFit fit_metamodel(const Vector& response, const Matrix& covariates, const BasisSpec& spec) {
  const Eigen::Index rows = response.size();
  if (covariates.rows() != rows) throw std::invalid_argument("fit_metamodel: response/covariate row mismatch");
  if (covariates.cols() < 1) throw std::invalid_argument("fit_metamodel: no covariates");
  if (!response.allFinite()) throw std::invalid_argument("fit_metamodel: non-finite response");
  if (!covariates.allFinite()) throw std::invalid_argument("fit_metamodel: non-finite covariate");
  if (spec.grid_points < 1 || !(spec.penalty_min > 0.0) || !(spec.penalty_max >= spec.penalty_min))
    throw std::invalid_argument("fit_metamodel: bad penalty grid");

  Design d = build_design(covariates, spec);
  const Eigen::Index p = d.basis.cols();
  if (rows <= p)
    throw EstimatorError("fit_metamodel: " + std::to_string(rows) + " observations for " +
                         std::to_string(p) + " basis columns");
  check_unpenalized_rank(d);

  Eigen::HouseholderQR<ColMatrix> qr(d.basis);
  const ColMatrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Vector qty = qr.householderQ().adjoint() * response;
  const Vector c = qty.head(p);
  const double tail_rss = qty.tail(rows - p).squaredNorm();
  const ColMatrix rtr = r.transpose() * r;
  const Vector rtc = r.transpose() * c;

  Vector pen = Vector::Zero(p);
  bool any_penalized = false;
  for (Eigen::Index j = 0; j < p; ++j)
    if (d.penalized[static_cast<std::size_t>(j)]) {
      pen(j) = 1.0;
      any_penalized = true;
    }

  const double n = static_cast<double>(rows);
  const std::size_t grid = any_penalized ? spec.grid_points : 1;
  double best_gcv = std::numeric_limits<double>::infinity();
  MetaModelFit fit;
  for (std::size_t g = 0; g < grid; ++g) {
    const double frac = grid == 1 ? 0.0 : static_cast<double>(g) / static_cast<double>(grid - 1);
    const double lambda =
        any_penalized ? std::exp(std::log(spec.penalty_min) + frac * (std::log(spec.penalty_max) - std::log(spec.penalty_min)))
                      : 0.0;
    ColMatrix a = rtr;
    a.diagonal() += n * lambda * pen;
    Eigen::LDLT<ColMatrix> chol(a);
    if (chol.info() != Eigen::Success || !chol.isPositive()) continue;
    const Vector beta = chol.solve(rtc);
    if (!beta.allFinite()) continue;
    const double edf = chol.solve(rtr).trace();
    const double rss = tail_rss + (c - r * beta).squaredNorm();
    if (!(n - edf > 0.5)) continue;
    const double gcv = n * rss / ((n - edf) * (n - edf));
    if (gcv < best_gcv) {
      best_gcv = gcv;
      fit.coefficients = beta;
      fit.penalty = lambda;
      fit.edf = edf;
      fit.gcv = gcv;
      fit.residual_sd = std::sqrt(std::max(0.0, rss) / (n - edf));
    }
  }
  if (!std::isfinite(best_gcv)) throw EstimatorError("fit_metamodel: penalised system singular for every penalty");

  fit.fitted = d.basis * fit.coefficients;
  fit.residuals = response - fit.fitted;
  fit.intercept = fit.coefficients(0);
  fit.column_labels = d.labels;
  fit.term_contributions.resize(rows, static_cast<Eigen::Index>(d.terms.size()));
  for (std::size_t t = 0; t < d.terms.size(); ++t) {
    const auto& term = d.terms[t];
    fit.term_contributions.col(static_cast<Eigen::Index>(t)) =
        d.basis.middleCols(term.first_column, term.columns) * fit.coefficients.segment(term.first_column, term.columns);
  }
  fit.terms = std::move(d.terms);
  return fit;
}

EvppiResult evppi_regression(const IncrementalNbTable& inb, const PsaSet& psa, const BasisSpec& spec) {
  if (inb.size() != psa.size()) throw std::invalid_argument("evppi_regression: INB and PSA sizes differ");
  const Matrix phi = psa.focal_draws();
  EvppiResult out;
  out.mu_phi.resize(inb.values.rows(), inb.values.cols());
  for (Eigen::Index t = 0; t < inb.values.cols(); ++t) {
    out.fits.push_back(fit_metamodel(inb.values.col(t), phi, spec));
    out.mu_phi.col(t) = out.fits.back().fitted;
  }
  out.value = mean_max0(out.mu_phi) - max0_of_means(inb.values);
  out.se = gain_standard_error(out.mu_phi, inb.values);
  return out;
}

}  // namespace voi
