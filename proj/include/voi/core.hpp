#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "voi/errors.hpp"
#include "voi/rng.hpp"

namespace voi {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// S draws of the parameter vector theta = (phi, psi).
///
/// Rows are simulations, columns are parameters. `focal()` lists the phi
/// columns (the parameters a proposed study informs); every other column is
/// psi. Construction validates: at least one row, finite entries, unique names,
/// and a non-empty, in-range, duplicate-free focal set.
class PsaSet {
 public:
  PsaSet(Matrix draws, std::vector<std::string> names, std::vector<std::size_t> focal);

  std::size_t size() const { return static_cast<std::size_t>(draws_.rows()); }
  std::size_t params() const { return static_cast<std::size_t>(draws_.cols()); }
  const Matrix& draws() const { return draws_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::size_t>& focal() const { return focal_; }

  std::span<const double> row(std::size_t s) const {
    return {draws_.data() + s * params(), params()};
  }
  std::vector<double> focal_row(std::size_t s) const;
  Matrix focal_draws() const;
  std::size_t column(const std::string& name) const;

  // The first `count` rows.
  PsaSet head(std::size_t count) const;

 private:
  Matrix draws_;
  std::vector<std::string> names_;
  std::vector<std::size_t> focal_;
};

/// Net benefit per draw (rows) and treatment (columns) at one willingness-to-pay.
struct NetBenefitTable {
  NetBenefitTable(Matrix values, double wtp);
  Matrix values;
  double wtp;
  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t arms() const { return static_cast<std::size_t>(values.cols()); }
};

/// Net benefit of arms 2..T relative to arm 1; S x (T-1).
struct IncrementalNbTable {
  Matrix values;
  double wtp = 0.0;
  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t columns() const { return static_cast<std::size_t>(values.cols()); }
};

struct StudyDesign {
  std::size_t n = 0;
  std::map<std::string, double> extras;

  double extra(const std::string& key, double fallback) const {
    auto it = extras.find(key);
    return it == extras.end() ? fallback : it->second;
  }
};

/// Simulated study data: named arrays whose meaning belongs to the model.
struct Dataset {
  StudyDesign design;
  std::map<std::string, std::vector<double>> arrays;

  const std::vector<double>& at(const std::string& key) const;
  double scalar(const std::string& key) const { return at(key).at(0); }
  bool empty() const { return design.n == 0; }
};

/// Contract every decision model satisfies.
///
/// `sample_data` and `log_likelihood` receive only the focal (phi) values, in
/// `focal()` order, so data can never depend on psi. `posterior_sample`
/// returns full theta rows: phi from p(phi | X) and psi from its prior.
class DecisionModel {
 public:
  virtual ~DecisionModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t arms() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual std::vector<std::size_t> focal() const = 0;

  virtual PsaSet sample_prior(std::size_t count, Rng& rng) const = 0;
  virtual std::vector<double> net_benefit(std::span<const double> theta, double wtp) const = 0;
  virtual Dataset sample_data(std::span<const double> phi, const StudyDesign& design,
                              Rng& rng) const = 0;
  virtual PsaSet posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const = 0;
  virtual double log_likelihood(const Dataset& data, std::span<const double> phi) const = 0;
  virtual std::vector<double> summarize(const Dataset& data) const = 0;

  // Default design for this model (per-arm or total sample size as the model
  // documents) with n replaced.
  virtual StudyDesign design(std::size_t n) const { return StudyDesign{n, {}}; }
};

enum class Method { nested_mc, strong, menzies, jalal, heath };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// One EVSI estimate: point value, optional replicate interval and diagnostics.
struct EvsiEstimate {
  Method method = Method::nested_mc;
  std::size_t n = 0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  // Monte Carlo standard error of a single run (outer-loop SE).
  double se = 0.0;
  std::size_t replicates = 1;
  double replicate_sd = 0.0;
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

NetBenefitTable compute_nb_table(const DecisionModel& model, const PsaSet& psa, double wtp);

// Mean of row maxima minus maximum of column means.
double evpi(const NetBenefitTable& nb);

IncrementalNbTable incremental(const NetBenefitTable& nb);

// mean_s max(0, mu_s1, ..., mu_s(T-1)).
double mean_max0(const Matrix& mu);
// max(0, column means of inb).
double max0_of_means(const Matrix& inb);
// Outer-loop standard error of mean_max0(mu) - max0_of_means(reference),
// holding the baseline arm fixed at the argmax of the reference means.
double gain_standard_error(const Matrix& mu, const Matrix& reference);

double enbs(double evsi_per_person, double population, double study_cost);

/// Gold-standard nested Monte Carlo EVSI: S prior draws, one simulated dataset
/// per draw, R posterior draws per dataset. `se` carries the outer-loop SE.
EvsiEstimate evsi_nested_mc(const DecisionModel& model, const StudyDesign& design,
                            std::size_t outer, std::size_t inner, double wtp, Rng& rng);

}  // namespace voi
