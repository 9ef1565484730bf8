#pragma once

#include <array>
#include <atomic>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "voi/bayes.hpp"
#include "voi/core.hpp"

namespace voi::models {

// 1 - exp(-lambda * a^g). Throws std::invalid_argument for lambda <= 0 or g <= 0.
double crc_onset_probability(double lambda, double g, double age);
// Onset hazard lambda * g * a^(g-1).
double crc_onset_hazard(double lambda, double g, double age);

/// Population age distribution; weights are normalised on construction.
class AgeTable {
 public:
  AgeTable(std::vector<int> ages, std::vector<double> weights);
  // CSV with header "age,weight"; rows outside [25, 90] are dropped.
  static AgeTable load(const std::string& path);

  const std::vector<int>& ages() const { return ages_; }
  const std::vector<double>& weights() const { return weights_; }
  int sample(Rng& rng) const;
  // Annual all-cause death probability 1 - w(a+1)/w(a), clamped to [0.002, 1];
  // 1 at and beyond the last age.
  double mortality(int age) const;

 private:
  std::vector<int> ages_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

enum CrcState : std::size_t {
  kCrcNormal, kCrcAdenoma, kCrcEarlyUndetected, kCrcLateUndetected, kCrcEarlyDetected,
  kCrcLateDetected, kCrcPostTreatment, kCrcDeath, kCrcOtherDeath, kCrcStates
};

struct CrcConfig {
  std::string age_table_path;
  double lambda_meanlog = -9.0706;  // log(1.15e-4)
  double lambda_sdlog = 0.5;
  double g_meanlog = 0.693147;
  double g_sdlog = 0.1;
  double sensitivity_mean = 0.98, sensitivity_sd = 0.01;
  double specificity_mean = 0.87, specificity_sd = 0.03;
  int start_age = 50;
  int end_age = 90;
  std::vector<int> screen_ages{50, 60, 70};
  double discount_rate = 0.03;
  double sd_fraction = 0.1;
  // Means of the gamma-distributed one-off costs.
  double screen_cost = 1400.0;
  double false_positive_cost = 600.0;
  double polypectomy_cost = 800.0;
  // Annual cost and utility means per CrcState. Death states are fixed at 0
  // and adenoma, being asymptomatic, shares the normal state's values.
  std::array<double, kCrcStates> state_cost{};
  std::array<double, kCrcStates> state_qol{};
  // Annual progression probability means, keyed as in `progression_names()`.
  std::vector<double> progression;
  std::size_t burn_in = 1000;

  static const std::vector<std::string>& progression_names();
  static CrcConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static CrcConfig load(const std::string& path);
  void validate() const;
};

struct CrcTrace {
  std::array<double, 2> qaly{};
  std::array<double, 2> cost{};
  double max_conservation_error = 0.0;
};

/// Colorectal-cancer screening model.
///
/// phi = (lambda, g) of the Weibull adenoma onset curve. A study samples n
/// ages from the age table and records adenoma presence X ~ Bernoulli(p(a)).
/// The decision compares no screening (arm 0) with screening at the configured
/// ages (arm 1) in an annual nine-state cohort.
class CrcModel final : public DecisionModel {
 public:
  CrcModel(CrcConfig config, AgeTable ages);
  static std::unique_ptr<CrcModel> load(const std::string& config_path);

  std::string name() const override { return "crc"; }
  std::size_t arms() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return names_; }
  std::vector<std::size_t> focal() const override { return {0, 1}; }

  PsaSet sample_prior(std::size_t count, Rng& rng) const override;
  std::vector<double> net_benefit(std::span<const double> theta, double wtp) const override;
  Dataset sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const override;
  PsaSet posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const override;
  double log_likelihood(const Dataset& data, std::span<const double> phi) const override;
  // (log lambda_hat, log g_hat), the maximum-likelihood estimate on the log scale.
  std::vector<double> summarize(const Dataset& data) const override;

  CrcTrace trace(std::span<const double> theta) const;
  const CrcConfig& config() const { return config_; }
  const AgeTable& age_table() const { return ages_; }
  const std::vector<bayes::PriorSpec>& priors() const { return priors_; }

  // Datasets whose outcomes were all 0 or all 1 (penalised MLE used).
  std::size_t penalised() const { return penalised_.load(); }
  // Datasets where the optimiser failed and binned prevalence was used.
  std::size_t fallbacks() const { return fallbacks_.load(); }

 private:
  std::vector<double> penalised_mle(const Dataset& data, double weight) const;
  bool binned_estimate(const Dataset& data, std::vector<double>& out) const;
  bool plausible(std::span<const double> log_phi) const;

  CrcConfig config_;
  AgeTable ages_;
  std::vector<std::string> names_;
  std::vector<bayes::PriorSpec> priors_;
  std::size_t sens_col_ = 0, spec_col_ = 0, screen_col_ = 0, fp_col_ = 0, polyp_col_ = 0;
  std::array<std::size_t, kCrcStates> cost_col_{}, qol_col_{};
  std::size_t progression_col_ = 0;
  mutable std::atomic<std::size_t> penalised_{0};
  mutable std::atomic<std::size_t> fallbacks_{0};
};

}  // namespace voi::models
