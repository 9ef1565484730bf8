#pragma once

#include <array>
#include <atomic>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "voi/bayes.hpp"
#include "voi/core.hpp"

namespace voi::models {

struct PainState {
  std::string name;
  double cost_mean = 0.0;  // per cycle
  double qol_mean = 0.5;   // per year
  bool first_line = false;
  bool absorbing = false;
};

/// One exit probability per cycle. When `arm_specific`, `mean[a]` is used for
/// arm a and each arm gets its own parameter; otherwise mean[0] is shared.
struct PainTransition {
  std::string from;
  std::string to;
  std::array<double, 2> mean{};
  bool arm_specific = false;
};

struct ChronicPainConfig {
  std::vector<PainState> states;
  std::vector<PainTransition> transitions;
  std::array<std::string, 2> arm_names{"morphine", "innovative"};
  // First-line drug cost per cycle, per arm.
  std::array<double, 2> drug_cost{0.0, 0.0};
  std::string start_state = "fl_no_ae";
  double sd_fraction = 0.1;
  double discount_rate = 0.03;
  int horizon_years = 15;
  int cycles_per_year = 12;
  double response_rate = 0.687;
  // Study outcomes: the two utilities the questionnaire measures and the
  // individual-level sd of each.
  std::array<std::string, 2> outcome_states{"fl_no_ae", "fl_withdraw_loe"};
  std::array<double, 2> individual_sd{0.30, 0.31};
  std::size_t burn_in = 1000;

  static ChronicPainConfig from_json(const nlohmann::json& j);
  static ChronicPainConfig load(const std::string& path);
  // Throws ConfigError naming the first problem.
  void validate() const;
  std::size_t state_index(const std::string& name) const;
};

struct PainTrace {
  std::array<double, 2> qaly{};
  std::array<double, 2> qaly_undiscounted{};
  std::array<double, 2> cost{};
  // Largest |sum of occupancy - 1| over cycles and arms.
  double max_conservation_error = 0.0;
};

enum class PainSummary { geometric, arithmetic };

/// Ten-state Markov model for first- and second-line chronic pain treatment.
///
/// theta holds one utility (beta) and one cost (gamma) per state, the two
/// first-line drug costs (gamma) and one probability (beta) per transition and
/// arm, each with sd = sd_fraction * mean. phi is the pair of utilities the
/// questionnaire measures. Returned questionnaires (probability
/// response_rate) give one beta-distributed value per outcome with the state
/// utility as mean and the configured individual-level sd.
class ChronicPainModel final : public DecisionModel {
 public:
  explicit ChronicPainModel(ChronicPainConfig config, PainSummary summary = PainSummary::geometric);

  std::string name() const override { return "chronic_pain"; }
  std::size_t arms() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return names_; }
  std::vector<std::size_t> focal() const override { return focal_; }

  PsaSet sample_prior(std::size_t count, Rng& rng) const override;
  std::vector<double> net_benefit(std::span<const double> theta, double wtp) const override;
  Dataset sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const override;
  PsaSet posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const override;
  double log_likelihood(const Dataset& data, std::span<const double> phi) const override;
  std::vector<double> summarize(const Dataset& data) const override;

  // (GM(y1), GM(1 - y1), GM(y2), GM(1 - y2)) over returned questionnaires.
  std::vector<double> summarize_geometric(const Dataset& data) const;
  // (mean(y1), var(y1), mean(y2), var(y2)).
  std::vector<double> summarize_arithmetic(const Dataset& data) const;

  PainTrace trace(std::span<const double> theta) const;
  const ChronicPainConfig& config() const { return config_; }
  const std::vector<bayes::PriorSpec>& priors() const { return priors_; }
  std::size_t rejections() const { return rejections_.load(); }
  std::size_t imputations() const { return imputations_.load(); }
  // True when the utility pair admits the individual-level beta distributions.
  bool feasible_phi(std::span<const double> phi) const;

 private:
  std::vector<double> imputed_geometric() const;

  ChronicPainConfig config_;
  PainSummary summary_;
  std::vector<std::string> names_;
  std::vector<bayes::PriorSpec> priors_;
  std::vector<std::size_t> focal_;
  std::size_t utility_offset_ = 0, cost_offset_ = 0, drug_offset_ = 0;
  // Per transition, parameter column for arm 0 and arm 1.
  std::vector<std::array<std::size_t, 2>> transition_columns_;
  std::vector<std::array<std::size_t, 2>> transition_states_;
  std::size_t start_ = 0;
  mutable std::atomic<std::size_t> rejections_{0};
  mutable std::atomic<std::size_t> imputations_{0};
};

}  // namespace voi::models
