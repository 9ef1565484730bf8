#include "voi/models/crc.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <nlohmann/json.hpp>

#include "voi/models/common.hpp"

namespace voi::models {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

const std::array<const char*, kCrcStates> kStateNames{
    "normal", "adenoma", "early_undetected", "late_undetected", "early_detected",
    "late_detected", "post_treatment", "crc_death", "other_death"};

enum Progression : std::size_t {
  kAdenomaToEarly, kEarlyToLate, kEarlySymptomatic, kLateSymptomatic, kLateCrcDeath,
  kEarlyTreatedCure, kEarlyTreatedDeath, kLateTreatedCure, kLateTreatedDeath, kProgressions
};

bool is_dead(std::size_t s) { return s == kCrcDeath || s == kCrcOtherDeath; }

// Log-likelihood of aggregated Bernoulli outcomes at log-scale (lambda, g).
double aggregated_loglik(const Dataset& data, double log_lambda, double log_g) {
  const auto& age = data.at("age");
  const auto& m = data.at("m");
  const auto& k = data.at("k");
  const double lambda = std::exp(log_lambda), g = std::exp(log_g);
  double ll = 0.0;
  for (std::size_t i = 0; i < age.size(); ++i) {
    const double cum = lambda * std::pow(age[i], g);
    // log p = log(1 - exp(-cum)), log(1 - p) = -cum
    const double log_p = std::log(-std::expm1(-cum));
    ll += (k[i] > 0.0 ? k[i] * log_p : 0.0) - (m[i] - k[i]) * cum;
  }
  return ll;
}

struct MleProblem {
  const Dataset* data;
  double weight;
  double mu[2];
  double sd[2];
};

double mle_objective(const gsl_vector* x, void* params) {
  const auto* p = static_cast<const MleProblem*>(params);
  const double a = gsl_vector_get(x, 0), b = gsl_vector_get(x, 1);
  double value = -aggregated_loglik(*p->data, a, b);
  if (p->weight > 0.0) {
    const double za = (a - p->mu[0]) / p->sd[0], zb = (b - p->mu[1]) / p->sd[1];
    value += 0.5 * p->weight * (za * za + zb * zb);
  }
  return std::isfinite(value) ? value : std::numeric_limits<double>::max();
}

// Nelder-Mead on the log scale; returns false when it does not converge.
bool nelder_mead(MleProblem& problem, std::vector<double>& x_out) {
  const gsl_multimin_fminimizer_type* type = gsl_multimin_fminimizer_nmsimplex2;
  gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(type, 2);
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, problem.mu[0]);
  gsl_vector_set(x, 1, problem.mu[1]);
  gsl_vector_set(step, 0, 0.5);
  gsl_vector_set(step, 1, 0.1);
  gsl_multimin_function fn{&mle_objective, 2, &problem};
  gsl_multimin_fminimizer_set(solver, &fn, x, step);
  int status = GSL_CONTINUE;
  for (int iter = 0; iter < 1000 && status == GSL_CONTINUE; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver)) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-7);
  }
  const bool ok = status == GSL_SUCCESS;
  x_out = {gsl_vector_get(solver->x, 0), gsl_vector_get(solver->x, 1)};
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(solver);
  return ok && std::isfinite(x_out[0]) && std::isfinite(x_out[1]);
}

double json_number(const nlohmann::json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

double crc_onset_probability(double lambda, double g, double age) {
  if (!(lambda > 0.0 && g > 0.0)) throw std::invalid_argument("crc_onset_probability: lambda and g must be positive");
  return -std::expm1(-lambda * std::pow(age, g));
}

double crc_onset_hazard(double lambda, double g, double age) {
  if (!(lambda > 0.0 && g > 0.0)) throw std::invalid_argument("crc_onset_hazard: lambda and g must be positive");
  return lambda * g * std::pow(age, g - 1.0);
}

AgeTable::AgeTable(std::vector<int> ages, std::vector<double> weights)
    : ages_{std::move(ages)}, weights_{std::move(weights)} {
  if (ages_.empty() || ages_.size() != weights_.size()) throw ConfigError("age table: ages and weights must match");
  double total = 0.0;
  for (std::size_t i = 0; i < ages_.size(); ++i) {
    if (i > 0 && ages_[i] != ages_[i - 1] + 1) throw ConfigError("age table: ages must be consecutive");
    if (!(weights_[i] > 0.0)) throw ConfigError("age table: weights must be positive");
    total += weights_[i];
  }
  double running = 0.0;
  for (double& w : weights_) {
    w /= total;
    running += w;
    cumulative_.push_back(running);
  }
  cumulative_.back() = 1.0;
}

AgeTable AgeTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open age table '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("age,weight", 0) != 0) throw ConfigError("age table '" + path + "': expected header age,weight");
  std::vector<int> ages;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    int age = 0;
    char comma = 0;
    double weight = 0.0;
    if (!(row >> age >> comma >> weight) || comma != ',') throw ConfigError("age table '" + path + "': bad row '" + line + "'");
    if (age < 25 || age > 90) continue;
    ages.push_back(age);
    weights.push_back(weight);
  }
  return AgeTable(std::move(ages), std::move(weights));
}

int AgeTable::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), ages_.size() - 1);
  return ages_[i];
}

double AgeTable::mortality(int age) const {
  if (age < ages_.front()) return 0.002;
  const auto i = static_cast<std::size_t>(age - ages_.front());
  if (i + 1 >= ages_.size()) return 1.0;
  return std::clamp(1.0 - weights_[i + 1] / weights_[i], 0.002, 1.0);
}

const std::vector<std::string>& CrcConfig::progression_names() {
  static const std::vector<std::string> names{
      "adenoma_to_early", "early_to_late", "early_symptomatic", "late_symptomatic", "late_crc_death",
      "early_treated_cure", "early_treated_death", "late_treated_cure", "late_treated_death"};
  return names;
}

CrcConfig CrcConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  CrcConfig c;
  try {
    const auto table = j.at("age_table").get<std::string>();
    c.age_table_path = std::filesystem::path(table).is_absolute() ? table : (std::filesystem::path(base_dir) / table).string();
    if (j.contains("onset")) {
      const auto& o = j.at("onset");
      c.lambda_meanlog = json_number(o, "lambda_meanlog", c.lambda_meanlog);
      c.lambda_sdlog = json_number(o, "lambda_sdlog", c.lambda_sdlog);
      c.g_meanlog = json_number(o, "g_meanlog", c.g_meanlog);
      c.g_sdlog = json_number(o, "g_sdlog", c.g_sdlog);
    }
    if (j.contains("sensitivity")) {
      c.sensitivity_mean = j.at("sensitivity").at("mean").get<double>();
      c.sensitivity_sd = j.at("sensitivity").at("sd").get<double>();
    }
    if (j.contains("specificity")) {
      c.specificity_mean = j.at("specificity").at("mean").get<double>();
      c.specificity_sd = j.at("specificity").at("sd").get<double>();
    }
    c.start_age = j.value("start_age", c.start_age);
    c.end_age = j.value("end_age", c.end_age);
    if (j.contains("screen_ages")) c.screen_ages = j.at("screen_ages").get<std::vector<int>>();
    c.discount_rate = j.value("discount_rate", c.discount_rate);
    c.sd_fraction = j.value("sd_fraction", c.sd_fraction);
    c.screen_cost = j.value("screen_cost", c.screen_cost);
    c.false_positive_cost = j.value("false_positive_cost", c.false_positive_cost);
    c.polypectomy_cost = j.value("polypectomy_cost", c.polypectomy_cost);
    const auto& states = j.at("states");
    for (std::size_t s = 0; s < kCrcStates; ++s) {
      if (is_dead(s) || s == kCrcAdenoma) continue;
      const auto& st = states.at(kStateNames[s]);
      c.state_cost[s] = st.at("cost").get<double>();
      c.state_qol[s] = st.at("qol").get<double>();
    }
    const auto& prog = j.at("progression");
    for (const auto& name : progression_names()) c.progression.push_back(prog.at(name).get<double>());
    c.burn_in = j.value("burn_in", c.burn_in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("crc config: ") + e.what());
  }
  c.validate();
  return c;
}

CrcConfig CrcConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open crc config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("crc config '" + path + "': " + e.what());
  }
  return from_json(j, std::filesystem::path(path).parent_path().string());
}

void CrcConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("crc config: " + what); };
  if (!(lambda_sdlog > 0.0 && g_sdlog > 0.0)) fail("onset sdlogs must be positive");
  if (!(start_age >= 25 && end_age <= 90 && start_age < end_age)) fail("ages must satisfy 25 <= start < end <= 90");
  for (double sd : {sensitivity_sd, specificity_sd})
    if (!(sd > 0.0)) fail("sensitivity/specificity sd must be positive");
  if (!(screen_cost > 0.0 && false_positive_cost > 0.0 && polypectomy_cost > 0.0)) fail("one-off costs must be positive");
  for (std::size_t s = 0; s < kCrcStates; ++s) {
    if (is_dead(s) || s == kCrcAdenoma) continue;
    if (state_cost[s] < 0.0) fail(std::string("negative cost for ") + kStateNames[s]);
    if (!(state_qol[s] > 0.0 && state_qol[s] < 1.0)) fail(std::string("utility of ") + kStateNames[s] + " must lie in (0,1)");
  }
  if (progression.size() != kProgressions) fail("progression needs " + std::to_string(kProgressions) + " entries");
  for (double p : progression)
    if (!(p > 0.0 && p < 1.0)) fail("progression probabilities must lie in (0,1)");
  if (!(sd_fraction > 0.0)) fail("sd_fraction must be positive");
}

CrcModel::CrcModel(CrcConfig config, AgeTable ages) : config_{std::move(config)}, ages_{std::move(ages)} {
  config_.validate();
  const auto& c = config_;
  const double f = c.sd_fraction;
  auto add = [&](const std::string& name, bayes::PriorSpec prior) {
    prior.validate();
    names_.push_back(name);
    priors_.push_back(prior);
    return names_.size() - 1;
  };
  auto beta_ms = [](double mean, double sd) {
    const auto b = bayes::moment_to_beta(mean, sd);
    return bayes::PriorSpec::make_beta(b.alpha, b.beta);
  };
  auto gamma_ms = [](double mean, double sd) {
    const auto [shape, rate] = bayes::moment_to_gamma(mean, sd);
    return bayes::PriorSpec::make_gamma(shape, rate);
  };
  add("lambda_w", bayes::PriorSpec::make_lognormal(c.lambda_meanlog, c.lambda_sdlog));
  add("g", bayes::PriorSpec::make_lognormal(c.g_meanlog, c.g_sdlog));
  sens_col_ = add("sensitivity", beta_ms(c.sensitivity_mean, c.sensitivity_sd));
  spec_col_ = add("specificity", beta_ms(c.specificity_mean, c.specificity_sd));
  screen_col_ = add("screen_cost", gamma_ms(c.screen_cost, f * c.screen_cost));
  fp_col_ = add("false_positive_cost", gamma_ms(c.false_positive_cost, f * c.false_positive_cost));
  polyp_col_ = add("polypectomy_cost", gamma_ms(c.polypectomy_cost, f * c.polypectomy_cost));
  for (std::size_t s = 0; s < kCrcStates; ++s) {
    cost_col_[s] = kNone;
    qol_col_[s] = kNone;
    if (is_dead(s) || s == kCrcAdenoma) continue;
    if (c.state_cost[s] > 0.0)
      cost_col_[s] = add(std::string("cost_") + kStateNames[s], gamma_ms(c.state_cost[s], f * c.state_cost[s]));
    qol_col_[s] = add(std::string("qol_") + kStateNames[s], beta_ms(c.state_qol[s], f * c.state_qol[s]));
  }
  progression_col_ = names_.size();
  for (std::size_t k = 0; k < kProgressions; ++k)
    add("p_" + CrcConfig::progression_names()[k], beta_ms(c.progression[k], f * c.progression[k]));
  cost_col_[kCrcAdenoma] = cost_col_[kCrcNormal];
  qol_col_[kCrcAdenoma] = qol_col_[kCrcNormal];
}

std::unique_ptr<CrcModel> CrcModel::load(const std::string& config_path) {
  auto config = CrcConfig::load(config_path);
  auto table = AgeTable::load(config.age_table_path);
  return std::make_unique<CrcModel>(std::move(config), std::move(table));
}

PsaSet CrcModel::sample_prior(std::size_t count, Rng& rng) const {
  const auto p = static_cast<Eigen::Index>(priors_.size());
  Matrix draws(static_cast<Eigen::Index>(count), p);
  for (Eigen::Index s = 0; s < draws.rows(); ++s)
    for (Eigen::Index j = 0; j < p; ++j) draws(s, j) = priors_[static_cast<std::size_t>(j)].sample(rng);
  return PsaSet{std::move(draws), names_, focal()};
}

CrcTrace CrcModel::trace(std::span<const double> theta) const {
  const auto& c = config_;
  const double lambda = theta[0], g = theta[1];
  const double sens = theta[sens_col_], spec = theta[spec_col_];
  auto prog = [&](std::size_t k) { return theta[progression_col_ + k]; };
  std::array<double, kCrcStates> cost{}, qol{};
  for (std::size_t s = 0; s < kCrcStates; ++s) {
    cost[s] = cost_col_[s] == kNone ? 0.0 : theta[cost_col_[s]];
    qol[s] = qol_col_[s] == kNone ? 0.0 : theta[qol_col_[s]];
  }

  CrcTrace out;
  for (int arm = 0; arm < 2; ++arm) {
    std::array<double, kCrcStates> occ{};
    const double prevalence = crc_onset_probability(lambda, g, c.start_age);
    occ[kCrcNormal] = 1.0 - prevalence;
    occ[kCrcAdenoma] = prevalence;
    double qaly = 0.0, total_cost = 0.0;
    for (int age = c.start_age; age < c.end_age; ++age) {
      const double discount = std::pow(1.0 + c.discount_rate, -(age - c.start_age));
      if (arm == 1 && std::find(c.screen_ages.begin(), c.screen_ages.end(), age) != c.screen_ages.end()) {
        const double screened = occ[kCrcNormal] + occ[kCrcAdenoma] + occ[kCrcEarlyUndetected] + occ[kCrcLateUndetected];
        const double removed = sens * occ[kCrcAdenoma];
        total_cost += discount * (screened * theta[screen_col_] + occ[kCrcNormal] * (1.0 - spec) * theta[fp_col_] +
                                  removed * theta[polyp_col_]);
        occ[kCrcAdenoma] -= removed;
        occ[kCrcNormal] += removed;
        const double early = sens * occ[kCrcEarlyUndetected], late = sens * occ[kCrcLateUndetected];
        occ[kCrcEarlyUndetected] -= early;
        occ[kCrcEarlyDetected] += early;
        occ[kCrcLateUndetected] -= late;
        occ[kCrcLateDetected] += late;
      }
      for (std::size_t s = 0; s < kCrcStates; ++s) {
        qaly += discount * occ[s] * qol[s];
        total_cost += discount * occ[s] * cost[s];
      }

      const double q = ages_.mortality(age);
      const double onset = 1.0 - std::exp(-lambda * (std::pow(age + 1.0, g) - std::pow(static_cast<double>(age), g)));
      std::array<double, kCrcStates> next{};
      double alive = 0.0;
      for (std::size_t s = 0; s < kCrcStates; ++s)
        if (!is_dead(s)) alive += occ[s];
      next[kCrcOtherDeath] = occ[kCrcOtherDeath] + q * alive;
      next[kCrcDeath] = occ[kCrcDeath];
      auto flow = [&](std::size_t from, std::size_t to, double p) {
        const double amount = (1.0 - q) * occ[from] * p;
        next[to] += amount;
        return amount;
      };
      double moved = 0.0;
      moved = flow(kCrcNormal, kCrcAdenoma, onset);
      next[kCrcNormal] += (1.0 - q) * occ[kCrcNormal] - moved;
      moved = flow(kCrcAdenoma, kCrcEarlyUndetected, prog(kAdenomaToEarly));
      next[kCrcAdenoma] += (1.0 - q) * occ[kCrcAdenoma] - moved;
      moved = flow(kCrcEarlyUndetected, kCrcLateUndetected, prog(kEarlyToLate)) +
              flow(kCrcEarlyUndetected, kCrcEarlyDetected, prog(kEarlySymptomatic));
      next[kCrcEarlyUndetected] += (1.0 - q) * occ[kCrcEarlyUndetected] - moved;
      moved = flow(kCrcLateUndetected, kCrcLateDetected, prog(kLateSymptomatic)) +
              flow(kCrcLateUndetected, kCrcDeath, prog(kLateCrcDeath));
      next[kCrcLateUndetected] += (1.0 - q) * occ[kCrcLateUndetected] - moved;
      moved = flow(kCrcEarlyDetected, kCrcPostTreatment, prog(kEarlyTreatedCure)) +
              flow(kCrcEarlyDetected, kCrcDeath, prog(kEarlyTreatedDeath));
      next[kCrcEarlyDetected] += (1.0 - q) * occ[kCrcEarlyDetected] - moved;
      moved = flow(kCrcLateDetected, kCrcPostTreatment, prog(kLateTreatedCure)) +
              flow(kCrcLateDetected, kCrcDeath, prog(kLateTreatedDeath));
      next[kCrcLateDetected] += (1.0 - q) * occ[kCrcLateDetected] - moved;
      next[kCrcPostTreatment] += (1.0 - q) * occ[kCrcPostTreatment];
      occ = next;
      double total = 0.0;
      for (double v : occ) total += v;
      out.max_conservation_error = std::max(out.max_conservation_error, std::abs(total - 1.0));
    }
    out.qaly[arm] = qaly;
    out.cost[arm] = total_cost;
  }
  return out;
}

std::vector<double> CrcModel::net_benefit(std::span<const double> theta, double wtp) const {
  const auto t = trace(theta);
  return {wtp * t.qaly[0] - t.cost[0], wtp * t.qaly[1] - t.cost[1]};
}

Dataset CrcModel::sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const {
  if (phi.size() != 2) throw std::invalid_argument("crc: phi must have 2 components");
  Dataset data{design, {}};
  if (design.n == 0) return data;
  std::map<int, std::pair<double, double>> counts;
  for (std::size_t i = 0; i < design.n; ++i) {
    const int age = ages_.sample(rng);
    const bool x = rng.bernoulli(crc_onset_probability(phi[0], phi[1], age));
    auto& [m, k] = counts[age];
    m += 1.0;
    k += x ? 1.0 : 0.0;
  }
  auto& age = data.arrays["age"];
  auto& m = data.arrays["m"];
  auto& k = data.arrays["k"];
  for (const auto& [a, mk] : counts) {
    age.push_back(a);
    m.push_back(mk.first);
    k.push_back(mk.second);
  }
  return data;
}

double CrcModel::log_likelihood(const Dataset& data, std::span<const double> phi) const {
  if (!(phi[0] > 0.0 && phi[1] > 0.0)) return kNegInf;
  if (data.empty()) return 0.0;
  return aggregated_loglik(data, std::log(phi[0]), std::log(phi[1]));
}

PsaSet CrcModel::posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const {
  PsaSet prior = sample_prior(count, rng);
  if (data.empty()) return prior;
  const auto& c = config_;
  // On the log scale the lognormal priors are normal densities.
  auto target = [&](std::span<const double> x) {
    const double ll = aggregated_loglik(data, x[0], x[1]);
    if (!std::isfinite(ll)) return kNegInf;
    return ll + bayes::normal_log_density(x[0], c.lambda_meanlog, c.lambda_sdlog) +
           bayes::normal_log_density(x[1], c.g_meanlog, c.g_sdlog);
  };
  const std::vector<double> init{c.lambda_meanlog, c.g_meanlog};
  const std::vector<double> sd{0.5 * c.lambda_sdlog, 0.5 * c.g_sdlog};
  const Matrix chain = run_focal_mh(target, init, sd, count, c.burn_in, rng, "crc");
  Matrix phi = chain.array().exp();
  return with_focal(prior, phi);
}

bool CrcModel::plausible(std::span<const double> log_phi) const {
  const auto& c = config_;
  return std::abs(log_phi[0] - c.lambda_meanlog) < 20.0 * c.lambda_sdlog &&
         std::abs(log_phi[1] - c.g_meanlog) < 1.5;
}

std::vector<double> CrcModel::penalised_mle(const Dataset& data, double weight) const {
  const auto& c = config_;
  MleProblem problem{&data, weight, {c.lambda_meanlog, c.g_meanlog}, {c.lambda_sdlog, c.g_sdlog}};
  std::vector<double> x;
  nelder_mead(problem, x);
  return x;
}

bool CrcModel::binned_estimate(const Dataset& data, std::vector<double>& out) const {
  // Ten-year bins, complementary log-log of prevalence regressed on log age.
  std::map<int, std::array<double, 3>> bins;  // sum m*age, m, k
  const auto& age = data.at("age");
  const auto& m = data.at("m");
  const auto& k = data.at("k");
  for (std::size_t i = 0; i < age.size(); ++i) {
    auto& b = bins[static_cast<int>(age[i]) / 10];
    b[0] += m[i] * age[i];
    b[1] += m[i];
    b[2] += k[i];
  }
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (const auto& [key, b] : bins) {
    const double p = b[2] / b[1];
    if (p <= 0.0 || p >= 1.0) continue;
    const double x = std::log(b[0] / b[1]), y = std::log(-std::log1p(-p)), w = b[1];
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
    ++used;
  }
  if (used < 2) return false;
  const double denom = sw * sxx - sx * sx;
  if (!(denom > 0.0)) return false;
  const double slope = (sw * sxy - sx * sy) / denom;
  if (!(slope > 0.0)) return false;
  const double intercept = (sy - slope * sx) / sw;
  out = {intercept, std::log(slope)};
  return plausible(out);
}

std::vector<double> CrcModel::summarize(const Dataset& data) const {
  const auto& c = config_;
  if (data.empty()) return {c.lambda_meanlog, c.g_meanlog};
  double total = 0.0, positives = 0.0;
  for (double v : data.at("m")) total += v;
  for (double v : data.at("k")) positives += v;
  if (positives == 0.0 || positives == total) {
    ++penalised_;
    return penalised_mle(data, 0.25);
  }
  MleProblem problem{&data, 0.0, {c.lambda_meanlog, c.g_meanlog}, {c.lambda_sdlog, c.g_sdlog}};
  std::vector<double> x;
  if (nelder_mead(problem, x) && plausible(x)) return x;
  ++fallbacks_;
  if (binned_estimate(data, x)) return x;
  ++penalised_;
  return penalised_mle(data, 0.25);
}

}  // namespace voi::models
