#include "voi/models/chronic_pain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <gsl/gsl_sf_psi.h>
#include <nlohmann/json.hpp>

#include "voi/models/common.hpp"

namespace voi::models {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kClamp = 1e-12;

double clamp_unit(double y) { return std::clamp(y, kClamp, 1.0 - kClamp); }

double beta_loglik_stats(double m, double sum_log, double sum_log1m, double a, double b) {
  return m * (std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)) + (a - 1.0) * sum_log + (b - 1.0) * sum_log1m;
}

}  // namespace

ChronicPainConfig ChronicPainConfig::from_json(const nlohmann::json& j) {
  ChronicPainConfig c;
  try {
    for (const auto& s : j.at("states")) {
      c.states.push_back({s.at("name").get<std::string>(), s.at("cost_mean").get<double>(),
                          s.at("qol_mean").get<double>(), s.value("first_line", false), s.value("absorbing", false)});
    }
    for (const auto& t : j.at("transitions")) {
      PainTransition tr{t.at("from").get<std::string>(), t.at("to").get<std::string>(), {}, false};
      const auto& mean = t.at("mean");
      if (mean.is_array()) {
        tr.mean = mean.get<std::array<double, 2>>();
        tr.arm_specific = true;
      } else {
        tr.mean = {mean.get<double>(), mean.get<double>()};
      }
      c.transitions.push_back(tr);
    }
    if (j.contains("arm_names")) c.arm_names = j.at("arm_names").get<std::array<std::string, 2>>();
    if (j.contains("drug_cost")) c.drug_cost = j.at("drug_cost").get<std::array<double, 2>>();
    if (j.contains("outcome_states")) c.outcome_states = j.at("outcome_states").get<std::array<std::string, 2>>();
    if (j.contains("individual_sd")) c.individual_sd = j.at("individual_sd").get<std::array<double, 2>>();
    c.start_state = j.value("start_state", c.start_state);
    c.sd_fraction = j.value("sd_fraction", c.sd_fraction);
    c.discount_rate = j.value("discount_rate", c.discount_rate);
    c.horizon_years = j.value("horizon_years", c.horizon_years);
    c.cycles_per_year = j.value("cycles_per_year", c.cycles_per_year);
    c.response_rate = j.value("response_rate", c.response_rate);
    c.burn_in = j.value("burn_in", c.burn_in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("chronic pain config: ") + e.what());
  }
  c.validate();
  return c;
}

ChronicPainConfig ChronicPainConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open chronic pain config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("chronic pain config '" + path + "': " + e.what());
  }
  return from_json(j);
}

std::size_t ChronicPainConfig::state_index(const std::string& name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].name == name) return i;
  throw ConfigError("chronic pain config: unknown state '" + name + "'");
}

void ChronicPainConfig::validate() const {
  if (states.size() < 2) throw ConfigError("chronic pain config: need at least two states");
  for (const auto& s : states) {
    if (!(s.qol_mean > 0.0 && s.qol_mean < 1.0))
      throw ConfigError("chronic pain config: utility of '" + s.name + "' must lie in (0,1)");
    if (!(s.cost_mean > 0.0)) throw ConfigError("chronic pain config: cost of '" + s.name + "' must be positive");
  }
  for (const auto& t : transitions) {
    const auto from = state_index(t.from);
    state_index(t.to);
    if (states[from].absorbing) throw ConfigError("chronic pain config: transition out of absorbing '" + t.from + "'");
    for (double m : t.mean)
      if (!(m > 0.0 && m < 1.0))
        throw ConfigError("chronic pain config: probability " + t.from + "->" + t.to + " must lie in (0,1)");
  }
  state_index(start_state);
  for (int k = 0; k < 2; ++k) {
    const double u = states[state_index(outcome_states[k])].qol_mean;
    if (!(individual_sd[k] > 0.0 && individual_sd[k] * individual_sd[k] < u * (1.0 - u)))
      throw ConfigError("chronic pain config: individual sd of '" + outcome_states[k] +
                        "' infeasible at its prior mean");
  }
  if (!(sd_fraction > 0.0)) throw ConfigError("chronic pain config: sd_fraction must be positive");
  if (!(drug_cost[0] > 0.0 && drug_cost[1] > 0.0)) throw ConfigError("chronic pain config: drug costs must be positive");
  if (horizon_years <= 0 || cycles_per_year <= 0) throw ConfigError("chronic pain config: bad horizon");
  if (!(response_rate > 0.0 && response_rate <= 1.0))
    throw ConfigError("chronic pain config: response_rate must lie in (0,1]");
}

ChronicPainModel::ChronicPainModel(ChronicPainConfig config, PainSummary summary)
    : config_{std::move(config)}, summary_{summary} {
  config_.validate();
  const auto& c = config_;
  const double f = c.sd_fraction;
  auto add_beta = [&](const std::string& name, double mean) {
    const auto d = bayes::moment_to_beta(mean, f * mean);
    names_.push_back(name);
    priors_.push_back(bayes::PriorSpec::make_beta(d.alpha, d.beta));
    return names_.size() - 1;
  };
  auto add_gamma = [&](const std::string& name, double mean) {
    const auto [shape, rate] = bayes::moment_to_gamma(mean, f * mean);
    names_.push_back(name);
    priors_.push_back(bayes::PriorSpec::make_gamma(shape, rate));
    return names_.size() - 1;
  };

  utility_offset_ = names_.size();
  for (const auto& s : c.states) add_beta("u_" + s.name, s.qol_mean);
  cost_offset_ = names_.size();
  for (const auto& s : c.states) add_gamma("c_" + s.name, s.cost_mean);
  drug_offset_ = names_.size();
  for (int a = 0; a < 2; ++a) add_gamma("drug_" + c.arm_names[a], c.drug_cost[a]);
  for (const auto& t : c.transitions) {
    const std::string base = "p_" + t.from + "_" + t.to;
    if (t.arm_specific) {
      const auto c0 = add_beta(base + "_" + c.arm_names[0], t.mean[0]);
      const auto c1 = add_beta(base + "_" + c.arm_names[1], t.mean[1]);
      transition_columns_.push_back({c0, c1});
    } else {
      const auto col = add_beta(base, t.mean[0]);
      transition_columns_.push_back({col, col});
    }
    transition_states_.push_back({c.state_index(t.from), c.state_index(t.to)});
  }
  for (const auto& s : c.outcome_states) focal_.push_back(utility_offset_ + c.state_index(s));
  start_ = c.state_index(c.start_state);
}

bool ChronicPainModel::feasible_phi(std::span<const double> phi) const {
  for (int k = 0; k < 2; ++k) {
    const double u = phi[k], sd = config_.individual_sd[k];
    if (!(u > 0.0 && u < 1.0 && sd * sd < u * (1.0 - u))) return false;
  }
  return true;
}

PsaSet ChronicPainModel::sample_prior(std::size_t count, Rng& rng) const {
  const auto p = static_cast<Eigen::Index>(priors_.size());
  Matrix draws(static_cast<Eigen::Index>(count), p);
  for (Eigen::Index s = 0; s < draws.rows(); ++s) {
    for (Eigen::Index j = 0; j < p; ++j) draws(s, j) = priors_[static_cast<std::size_t>(j)].sample(rng);
    // Utility pairs that cannot carry the individual-level sd are redrawn.
    while (true) {
      const std::array<double, 2> phi{draws(s, static_cast<Eigen::Index>(focal_[0])),
                                      draws(s, static_cast<Eigen::Index>(focal_[1]))};
      if (feasible_phi(phi)) break;
      ++rejections_;
      for (auto j : focal_) draws(s, static_cast<Eigen::Index>(j)) = priors_[j].sample(rng);
    }
  }
  return PsaSet{std::move(draws), names_, focal_};
}

PainTrace ChronicPainModel::trace(std::span<const double> theta) const {
  const auto& c = config_;
  const auto k = static_cast<Eigen::Index>(c.states.size());
  const int cycles = c.horizon_years * c.cycles_per_year;
  const double per_cycle = 1.0 / c.cycles_per_year;
  PainTrace out;
  for (int arm = 0; arm < 2; ++arm) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t t = 0; t < transition_states_.size(); ++t) {
      const auto [from, to] = transition_states_[t];
      p(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) += theta[transition_columns_[t][arm]];
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      const double exits = p.row(i).sum();
      if (exits > 1.0) p.row(i) /= exits;
      p(i, i) += 1.0 - p.row(i).sum();
    }
    Eigen::VectorXd u(k), cost(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto si = static_cast<std::size_t>(i);
      u(i) = theta[utility_offset_ + si];
      cost(i) = theta[cost_offset_ + si] + (c.states[si].first_line ? theta[drug_offset_ + arm] : 0.0);
    }
    Eigen::RowVectorXd occ = Eigen::RowVectorXd::Zero(k);
    occ(static_cast<Eigen::Index>(start_)) = 1.0;
    double qaly = 0.0, qaly_raw = 0.0, total_cost = 0.0;
    for (int t = 0; t < cycles; ++t) {
      const double discount = std::pow(1.0 + c.discount_rate, -t * per_cycle);
      const double q = occ.dot(u) * per_cycle;
      qaly += discount * q;
      qaly_raw += q;
      total_cost += discount * occ.dot(cost);
      occ = occ * p;
      out.max_conservation_error = std::max(out.max_conservation_error, std::abs(occ.sum() - 1.0));
    }
    out.qaly[arm] = qaly;
    out.qaly_undiscounted[arm] = qaly_raw;
    out.cost[arm] = total_cost;
  }
  return out;
}

std::vector<double> ChronicPainModel::net_benefit(std::span<const double> theta, double wtp) const {
  const auto t = trace(theta);
  return {wtp * t.qaly[0] - t.cost[0], wtp * t.qaly[1] - t.cost[1]};
}

Dataset ChronicPainModel::sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const {
  if (phi.size() != 2) throw std::invalid_argument("chronic_pain: phi must have 2 components");
  Dataset data{design, {}};
  if (design.n == 0) return data;
  const auto b1 = bayes::moment_to_beta(phi[0], config_.individual_sd[0]);
  const auto b2 = bayes::moment_to_beta(phi[1], config_.individual_sd[1]);
  const double rate = design.extra("response_rate", config_.response_rate);
  std::vector<double> y1, y2;
  for (std::size_t i = 0; i < design.n; ++i) {
    if (!rng.bernoulli(rate)) continue;
    y1.push_back(clamp_unit(rng.beta(b1.alpha, b1.beta)));
    y2.push_back(clamp_unit(rng.beta(b2.alpha, b2.beta)));
  }
  double s1 = 0.0, s1m = 0.0, s2 = 0.0, s2m = 0.0;
  for (std::size_t i = 0; i < y1.size(); ++i) {
    s1 += std::log(y1[i]);
    s1m += std::log1p(-y1[i]);
    s2 += std::log(y2[i]);
    s2m += std::log1p(-y2[i]);
  }
  data.arrays["responders"] = {static_cast<double>(y1.size())};
  data.arrays["sum_log_y1"] = {s1};
  data.arrays["sum_log1m_y1"] = {s1m};
  data.arrays["sum_log_y2"] = {s2};
  data.arrays["sum_log1m_y2"] = {s2m};
  data.arrays["y1"] = std::move(y1);
  data.arrays["y2"] = std::move(y2);
  return data;
}

double ChronicPainModel::log_likelihood(const Dataset& data, std::span<const double> phi) const {
  if (!feasible_phi(phi)) return kNegInf;
  if (data.empty()) return 0.0;
  const double m = data.scalar("responders");
  if (m == 0.0) return 0.0;
  const auto b1 = bayes::moment_to_beta(phi[0], config_.individual_sd[0]);
  const auto b2 = bayes::moment_to_beta(phi[1], config_.individual_sd[1]);
  return beta_loglik_stats(m, data.scalar("sum_log_y1"), data.scalar("sum_log1m_y1"), b1.alpha, b1.beta) +
         beta_loglik_stats(m, data.scalar("sum_log_y2"), data.scalar("sum_log1m_y2"), b2.alpha, b2.beta);
}

PsaSet ChronicPainModel::posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const {
  PsaSet prior = sample_prior(count, rng);
  if (data.empty() || data.scalar("responders") == 0.0) return prior;
  const auto& p0 = priors_[focal_[0]];
  const auto& p1 = priors_[focal_[1]];
  auto target = [&](std::span<const double> x) {
    const std::array<double, 2> phi{bayes::inv_logit(x[0]), bayes::inv_logit(x[1])};
    const double ll = log_likelihood(data, phi);
    if (!std::isfinite(ll)) return kNegInf;
    return ll + p0.log_density(phi[0]) + p1.log_density(phi[1]) + bayes::log_jacobian_logit(x[0]) +
           bayes::log_jacobian_logit(x[1]);
  };
  const std::vector<double> init{bayes::logit(p0.mean()), bayes::logit(p1.mean())};
  const std::vector<double> sd{0.3, 0.3};
  const Matrix chain = run_focal_mh(target, init, sd, count, config_.burn_in, rng, "chronic_pain");
  Matrix phi(chain.rows(), 2);
  for (Eigen::Index r = 0; r < chain.rows(); ++r)
    for (int k = 0; k < 2; ++k) phi(r, k) = bayes::inv_logit(chain(r, k));
  return with_focal(prior, phi);
}

std::vector<double> ChronicPainModel::imputed_geometric() const {
  std::vector<double> out;
  for (int k = 0; k < 2; ++k) {
    const auto b = bayes::moment_to_beta(priors_[focal_[k]].mean(), config_.individual_sd[k]);
    const double digamma_sum = gsl_sf_psi(b.alpha + b.beta);
    out.push_back(std::exp(gsl_sf_psi(b.alpha) - digamma_sum));
    out.push_back(std::exp(gsl_sf_psi(b.beta) - digamma_sum));
  }
  return out;
}

std::vector<double> ChronicPainModel::summarize_geometric(const Dataset& data) const {
  const double m = data.empty() ? 0.0 : data.scalar("responders");
  if (m == 0.0) {
    ++imputations_;
    return imputed_geometric();
  }
  return {std::exp(data.scalar("sum_log_y1") / m), std::exp(data.scalar("sum_log1m_y1") / m),
          std::exp(data.scalar("sum_log_y2") / m), std::exp(data.scalar("sum_log1m_y2") / m)};
}

std::vector<double> ChronicPainModel::summarize_arithmetic(const Dataset& data) const {
  const double m = data.empty() ? 0.0 : data.scalar("responders");
  if (m == 0.0) {
    ++imputations_;
    const double sd0 = config_.individual_sd[0], sd1 = config_.individual_sd[1];
    return {priors_[focal_[0]].mean(), sd0 * sd0, priors_[focal_[1]].mean(), sd1 * sd1};
  }
  std::vector<double> out;
  for (const char* key : {"y1", "y2"}) {
    const auto& y = data.at(key);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    out.push_back(mean);
    out.push_back(m > 1.0 ? var / (m - 1.0) : 0.0);
  }
  return out;
}

std::vector<double> ChronicPainModel::summarize(const Dataset& data) const {
  return summary_ == PainSummary::geometric ? summarize_geometric(data) : summarize_arithmetic(data);
}

}  // namespace voi::models
