#pragma once

#include <array>
#include <atomic>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "voi/bayes.hpp"
#include "voi/core.hpp"

namespace voi::models {

/// Inputs of the four-state adverse-event model (home care, hospital,
/// recovered, dead). Gamma1/Gamma2 are 15-day probabilities; the Markov model
/// uses the daily gamma = Gamma / 15.
struct ChemotherapyParams {
  double pi0 = 0.1;     // adverse-event probability, standard care
  double rho = 0.65;    // proportional reduction with the novel treatment
  double gamma1_15 = 0.4;
  double gamma2_15 = 0.3;
  double lambda1 = 0.45;  // daily recovery probability at home
  double lambda2 = 0.35;  // daily recovery probability in hospital
  double q = 0.98;        // QoL without adverse events / recovered
  double cost_death = 4000.0;
  double cost_home = 2300.0;  // per day
  double cost_hosp = 6400.0;  // per day
  double qol_home = 0.5;
  double qol_hosp = 0.2;
  std::array<double, 2> treatment_cost{110.0, 420.0};

  double gamma1() const { return gamma1_15 / 15.0; }
  double gamma2() const { return gamma2_15 / 15.0; }
  bool feasible() const;
};

struct ChemotherapyTrace {
  std::array<double, 2> qaly{};
  std::array<double, 2> cost{};
  // Occupancy of the adverse-event cohort at the start of each day plus the
  // final state: (horizon + 1) x 4, columns home, hospital, recovered, dead.
  Matrix occupancy;
};

ChemotherapyTrace chemo_markov_trace(const ChemotherapyParams& p, int horizon_days = 15);

struct ChemotherapyConfig {
  // Baseline data combined with the Beta(1,1) priors of pi0, Gamma1, Gamma2.
  long baseline_patients = 111;
  long baseline_adverse_events = 10;
  long baseline_hospitalised = 4;
  long baseline_deaths = 1;
  std::size_t patients_per_arm = 150;
  int horizon_days = 15;
  std::size_t burn_in = 1000;
  std::array<double, 2> treatment_cost{110.0, 420.0};

  static ChemotherapyConfig from_json(const nlohmann::json& j);
};

/// Chemotherapy adverse-event model.
///
/// phi = (pi0, rho, Gamma1, Gamma2, lambda1, lambda2); the trial records
/// adverse events per arm, hospitalisations, deaths and exponential recovery
/// times. Infeasible prior draws (rho * pi0 > 1, rho < 0, gamma + lambda > 1)
/// are rejected and redrawn; `rejections()` counts them.
class ChemotherapyModel final : public DecisionModel {
 public:
  explicit ChemotherapyModel(ChemotherapyConfig config = {});

  std::string name() const override { return "chemotherapy"; }
  std::size_t arms() const override { return 2; }
  std::vector<std::string> parameter_names() const override;
  std::vector<std::size_t> focal() const override { return {0, 1, 2, 3, 4, 5}; }

  PsaSet sample_prior(std::size_t count, Rng& rng) const override;
  std::vector<double> net_benefit(std::span<const double> theta, double wtp) const override;
  Dataset sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const override;
  PsaSet posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const override;
  double log_likelihood(const Dataset& data, std::span<const double> phi) const override;
  std::vector<double> summarize(const Dataset& data) const override;
  StudyDesign design(std::size_t n) const override { return StudyDesign{n, {}}; }

  ChemotherapyParams params(std::span<const double> theta) const;
  const ChemotherapyConfig& config() const { return config_; }
  std::size_t rejections() const { return rejections_.load(); }
  std::size_t imputations() const { return imputations_.load(); }

  // Priors in parameter order.
  const std::vector<bayes::PriorSpec>& priors() const { return priors_; }

 private:
  double log_kernel(const Dataset& data, std::span<const double> phi) const;

  ChemotherapyConfig config_;
  std::vector<bayes::PriorSpec> priors_;
  mutable std::atomic<std::size_t> rejections_{0};
  mutable std::atomic<std::size_t> imputations_{0};
};

}  // namespace voi::models
