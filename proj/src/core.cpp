#include "voi/core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "voi/parallel.hpp"

namespace voi {

PsaSet::PsaSet(Matrix draws, std::vector<std::string> names, std::vector<std::size_t> focal)
    : draws_{std::move(draws)}, names_{std::move(names)}, focal_{std::move(focal)} {
  if (draws_.rows() < 1) throw std::invalid_argument("PsaSet: need at least one draw");
  if (names_.size() != params())
    throw std::invalid_argument("PsaSet: " + std::to_string(names_.size()) + " names for " +
                                std::to_string(params()) + " columns");
  if (!draws_.allFinite()) throw std::invalid_argument("PsaSet: non-finite draw");
  if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size())
    throw std::invalid_argument("PsaSet: duplicate parameter label");
  if (focal_.empty()) throw std::invalid_argument("PsaSet: empty focal set");
  std::set<std::size_t> seen;
  for (auto j : focal_) {
    if (j >= params()) throw std::invalid_argument("PsaSet: focal index out of range");
    if (!seen.insert(j).second) throw std::invalid_argument("PsaSet: duplicate focal index");
  }
}

std::vector<double> PsaSet::focal_row(std::size_t s) const {
  std::vector<double> out;
  out.reserve(focal_.size());
  for (auto j : focal_) out.push_back(draws_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)));
  return out;
}

Matrix PsaSet::focal_draws() const {
  Matrix out(draws_.rows(), static_cast<Eigen::Index>(focal_.size()));
  for (std::size_t c = 0; c < focal_.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) = draws_.col(static_cast<Eigen::Index>(focal_[c]));
  return out;
}

std::size_t PsaSet::column(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("PsaSet: no parameter named " + name);
  return static_cast<std::size_t>(it - names_.begin());
}

PsaSet PsaSet::head(std::size_t count) const {
  if (count == 0 || count > size()) throw std::invalid_argument("PsaSet::head: bad row count");
  return PsaSet{draws_.topRows(static_cast<Eigen::Index>(count)), names_, focal_};
}

NetBenefitTable::NetBenefitTable(Matrix v, double w) : values{std::move(v)}, wtp{w} {
  if (values.cols() < 2) throw std::invalid_argument("NetBenefitTable: need at least two arms");
  if (values.rows() < 1) throw std::invalid_argument("NetBenefitTable: empty table");
  if (!values.allFinite()) throw std::invalid_argument("NetBenefitTable: non-finite entry");
}

const std::vector<double>& Dataset::at(const std::string& key) const {
  auto it = arrays.find(key);
  if (it == arrays.end()) throw std::out_of_range("Dataset: no array named " + key);
  return it->second;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::nested_mc: return "nested_mc";
    case Method::strong: return "strong";
    case Method::menzies: return "menzies";
    case Method::jalal: return "jalal";
    case Method::heath: return "heath";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  for (auto m : {Method::nested_mc, Method::strong, Method::menzies, Method::jalal, Method::heath})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown method '" + s + "'");
}

NetBenefitTable compute_nb_table(const DecisionModel& model, const PsaSet& psa, double wtp) {
  if (wtp < 0.0) throw std::invalid_argument("compute_nb_table: negative willingness-to-pay");
  const auto arms = model.arms();
  Matrix values(static_cast<Eigen::Index>(psa.size()), static_cast<Eigen::Index>(arms));
  parallel_for(psa.size(), [&](std::size_t s) {
    const auto nb = model.net_benefit(psa.row(s), wtp);
    const auto row = static_cast<Eigen::Index>(s);
    bool finite = nb.size() == arms;
    for (std::size_t t = 0; finite && t < arms; ++t) {
      finite = std::isfinite(nb[t]);
      values(row, static_cast<Eigen::Index>(t)) = nb[t];
    }
    if (!finite) {
      std::ostringstream msg;
      msg << model.name() << ": non-finite net benefit at draw " << s << " (";
      const auto theta = psa.row(s);
      for (std::size_t j = 0; j < theta.size(); ++j)
        msg << (j ? ", " : "") << psa.names()[j] << "=" << theta[j];
      msg << ")";
      throw EstimatorError(msg.str());
    }
  });
  return NetBenefitTable{std::move(values), wtp};
}

IncrementalNbTable incremental(const NetBenefitTable& nb) {
  IncrementalNbTable out;
  out.wtp = nb.wtp;
  out.values = nb.values.rightCols(nb.values.cols() - 1).colwise() - nb.values.col(0);
  return out;
}

double mean_max0(const Matrix& mu) {
  double total = 0.0;
  for (Eigen::Index s = 0; s < mu.rows(); ++s) total += std::max(0.0, mu.row(s).maxCoeff());
  return total / static_cast<double>(mu.rows());
}

double max0_of_means(const Matrix& inb) {
  return std::max(0.0, inb.colwise().mean().maxCoeff());
}

// Computed on the incremental scale so NB and [0, INB] inputs give identical bits.
double evpi(const NetBenefitTable& nb) {
  const auto inb = incremental(nb);
  return mean_max0(inb.values) - max0_of_means(inb.values);
}

namespace {

double sample_variance(const Vector& x) {
  if (x.size() < 2) return 0.0;
  const double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

Vector row_max0(const Matrix& mu) {
  Vector out(mu.rows());
  for (Eigen::Index s = 0; s < mu.rows(); ++s) out(s) = std::max(0.0, mu.row(s).maxCoeff());
  return out;
}

}  // namespace

double gain_standard_error(const Matrix& mu, const Matrix& reference) {
  const Vector gains = row_max0(mu);
  const Eigen::RowVectorXd means = reference.colwise().mean();
  Eigen::Index best = 0;
  const double best_mean = means.maxCoeff(&best);
  Vector baseline = Vector::Zero(reference.rows());
  if (best_mean > 0.0) baseline = reference.col(best);

  if (mu.rows() == reference.rows()) {
    const Vector d = gains - baseline;
    return std::sqrt(sample_variance(d) / static_cast<double>(d.size()));
  }
  return std::sqrt(sample_variance(gains) / static_cast<double>(gains.size()) +
                   sample_variance(baseline) / static_cast<double>(baseline.size()));
}

double enbs(double evsi_per_person, double population, double study_cost) {
  if (population < 0.0 || study_cost < 0.0)
    throw std::invalid_argument("enbs: population and study cost must be non-negative");
  return evsi_per_person * population - study_cost;
}

EvsiEstimate evsi_nested_mc(const DecisionModel& model, const StudyDesign& design,
                            std::size_t outer, std::size_t inner, double wtp, Rng& rng) {
  if (outer < 2 || inner < 2) throw std::invalid_argument("evsi_nested_mc: S and R must be >= 2");
  const auto start = std::chrono::steady_clock::now();

  Rng prior_rng = rng.fork();
  const Rng streams = rng.fork();
  const PsaSet prior = model.sample_prior(outer, prior_rng);
  const auto inb = incremental(compute_nb_table(model, prior, wtp));

  Matrix mu(static_cast<Eigen::Index>(outer), inb.values.cols());
  // No data: every posterior is the prior, whose mean the full prior sample estimates best.
  if (design.n == 0) mu.rowwise() = inb.values.colwise().mean();
  else parallel_for(outer, [&](std::size_t s) {
    Rng r = streams.stream(s);
    const auto phi = prior.focal_row(s);
    const Dataset data = model.sample_data(phi, design, r);
    try {
      const PsaSet post = model.posterior_sample(data, inner, r);
      const auto post_inb = incremental(compute_nb_table(model, post, wtp));
      mu.row(static_cast<Eigen::Index>(s)) = post_inb.values.colwise().mean();
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("nested MC dataset " + std::to_string(s) + ": " + e.what());
    }
  });

  EvsiEstimate est;
  est.method = Method::nested_mc;
  est.n = design.n;
  est.value = mean_max0(mu) - max0_of_means(inb.values);
  est.lo = est.hi = est.value;
  est.se = gain_standard_error(mu, inb.values);
  est.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

}  // namespace voi
