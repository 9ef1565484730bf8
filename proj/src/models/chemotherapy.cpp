#include "voi/models/chemotherapy.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "voi/models/common.hpp"

namespace voi::models {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum Col : std::size_t {
  kPi0, kRho, kGamma1, kGamma2, kLambda1, kLambda2,
  kQ, kCostDeath, kCostHome, kCostHosp, kQolHome, kQolHosp,
  kColumns
};

double binomial_log_coef(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double mean_or(const std::vector<double>& v, double fallback) {
  if (v.empty()) return fallback;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

bool ChemotherapyParams::feasible() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  return prob(pi0) && rho >= 0.0 && prob(rho * pi0) && prob(gamma1_15) && prob(gamma2_15) && prob(lambda1) &&
         prob(lambda2) && gamma1() + lambda1 <= 1.0 && gamma2() + lambda2 <= 1.0 && prob(q) && prob(qol_home) &&
         prob(qol_hosp) && cost_death >= 0.0 && cost_home >= 0.0 && cost_hosp >= 0.0;
}

ChemotherapyTrace chemo_markov_trace(const ChemotherapyParams& p, int horizon_days) {
  if (!p.feasible()) throw std::invalid_argument("chemo_markov_trace: infeasible parameters");
  const double g1 = p.gamma1(), g2 = p.gamma2();
  ChemotherapyTrace trace;
  trace.occupancy.resize(horizon_days + 1, 4);

  double home = 1.0, hosp = 0.0, rec = 0.0, dead = 0.0;
  double ae_qaly = 0.0, ae_cost = 0.0;
  for (int day = 0; day < horizon_days; ++day) {
    trace.occupancy.row(day) << home, hosp, rec, dead;
    ae_qaly += (home * p.qol_home + hosp * p.qol_hosp + rec * p.q) / 365.0;
    ae_cost += home * p.cost_home + hosp * p.cost_hosp;
    const double to_dead = hosp * g2;
    ae_cost += to_dead * p.cost_death;
    const double next_home = home * (1.0 - g1 - p.lambda1);
    const double next_hosp = hosp * (1.0 - g2 - p.lambda2) + home * g1;
    rec += home * p.lambda1 + hosp * p.lambda2;
    dead += to_dead;
    home = next_home;
    hosp = next_hosp;
  }
  trace.occupancy.row(horizon_days) << home, hosp, rec, dead;

  const double no_ae_qaly = horizon_days * p.q / 365.0;
  const std::array<double, 2> ae_rate{p.pi0, p.rho * p.pi0};
  for (int arm = 0; arm < 2; ++arm) {
    trace.qaly[arm] = (1.0 - ae_rate[arm]) * no_ae_qaly + ae_rate[arm] * ae_qaly;
    trace.cost[arm] = p.treatment_cost[arm] + ae_rate[arm] * ae_cost;
  }
  return trace;
}

ChemotherapyConfig ChemotherapyConfig::from_json(const nlohmann::json& j) {
  ChemotherapyConfig c;
  c.baseline_patients = j.value("baseline_patients", c.baseline_patients);
  c.baseline_adverse_events = j.value("baseline_adverse_events", c.baseline_adverse_events);
  c.baseline_hospitalised = j.value("baseline_hospitalised", c.baseline_hospitalised);
  c.baseline_deaths = j.value("baseline_deaths", c.baseline_deaths);
  c.patients_per_arm = j.value("patients_per_arm", c.patients_per_arm);
  c.horizon_days = j.value("horizon_days", c.horizon_days);
  c.burn_in = j.value("burn_in", c.burn_in);
  if (j.contains("treatment_cost")) c.treatment_cost = j.at("treatment_cost").get<std::array<double, 2>>();
  return c;
}

ChemotherapyModel::ChemotherapyModel(ChemotherapyConfig config) : config_{config} {
  using bayes::PriorSpec;
  const auto& c = config_;
  if (c.baseline_adverse_events > c.baseline_patients || c.baseline_hospitalised > c.baseline_adverse_events ||
      c.baseline_deaths > c.baseline_hospitalised || c.baseline_deaths < 0)
    throw std::invalid_argument("ChemotherapyConfig: inconsistent baseline counts");
  const auto pi0 = bayes::conjugate_beta_binomial({1.0, 1.0}, c.baseline_adverse_events, c.baseline_patients);
  const auto g1 = bayes::conjugate_beta_binomial({1.0, 1.0}, c.baseline_hospitalised, c.baseline_adverse_events);
  const auto g2 = bayes::conjugate_beta_binomial({1.0, 1.0}, c.baseline_deaths, c.baseline_hospitalised);
  priors_ = {
      PriorSpec::make_beta(pi0.alpha, pi0.beta),
      PriorSpec::make_normal(0.65, 100.0),
      PriorSpec::make_beta(g1.alpha, g1.beta),
      PriorSpec::make_beta(g2.alpha, g2.beta),
      PriorSpec::make_beta(5.12, 6.26),
      PriorSpec::make_beta(3.63, 6.74),
      PriorSpec::make_beta(18.23, 0.372),
      PriorSpec::make_lognormal(8.33, 0.13),
      PriorSpec::make_lognormal(7.74, 0.039),
      PriorSpec::make_lognormal(8.77, 0.15),
      PriorSpec::make_beta(5.75, 5.75),
      PriorSpec::make_beta(0.87, 3.47),
  };
  for (const auto& p : priors_) p.validate();
}

std::vector<std::string> ChemotherapyModel::parameter_names() const {
  return {"pi0", "rho", "Gamma1", "Gamma2", "lambda1", "lambda2",
          "q", "cost_death", "cost_home", "cost_hosp", "qol_home", "qol_hosp"};
}

ChemotherapyParams ChemotherapyModel::params(std::span<const double> t) const {
  ChemotherapyParams p;
  p.pi0 = t[kPi0];
  p.rho = t[kRho];
  p.gamma1_15 = t[kGamma1];
  p.gamma2_15 = t[kGamma2];
  p.lambda1 = t[kLambda1];
  p.lambda2 = t[kLambda2];
  p.q = t[kQ];
  p.cost_death = t[kCostDeath];
  p.cost_home = t[kCostHome];
  p.cost_hosp = t[kCostHosp];
  p.qol_home = t[kQolHome];
  p.qol_hosp = t[kQolHosp];
  p.treatment_cost = config_.treatment_cost;
  return p;
}

PsaSet ChemotherapyModel::sample_prior(std::size_t count, Rng& rng) const {
  Matrix draws(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(kColumns));
  std::array<double, kColumns> row{};
  for (Eigen::Index s = 0; s < draws.rows(); ++s) {
    for (std::size_t j = kQ; j < kColumns; ++j) row[j] = priors_[j].sample(rng);
    while (true) {
      for (std::size_t j = kPi0; j <= kLambda2; ++j) row[j] = priors_[j].sample(rng);
      if (params(row).feasible()) break;
      ++rejections_;
    }
    for (std::size_t j = 0; j < kColumns; ++j) draws(s, static_cast<Eigen::Index>(j)) = row[j];
  }
  return PsaSet{std::move(draws), parameter_names(), focal()};
}

std::vector<double> ChemotherapyModel::net_benefit(std::span<const double> theta, double wtp) const {
  const auto trace = chemo_markov_trace(params(theta), config_.horizon_days);
  return {wtp * trace.qaly[0] - trace.cost[0], wtp * trace.qaly[1] - trace.cost[1]};
}

Dataset ChemotherapyModel::sample_data(std::span<const double> phi, const StudyDesign& design, Rng& rng) const {
  if (phi.size() != 6) throw std::invalid_argument("chemotherapy: phi must have 6 components");
  Dataset data{design, {}};
  const long n = static_cast<long>(design.n);
  const double pi0 = phi[kPi0], rho = phi[kRho];
  const double g1 = phi[kGamma1] / 15.0, g2 = phi[kGamma2] / 15.0;
  const long ae0 = rng.binomial(n, pi0);
  const long ae1 = rng.binomial(n, rho * pi0);
  const long hosp = rng.binomial(ae0 + ae1, g1);
  const long death = rng.binomial(hosp, g2);
  const double eta1 = -std::log(phi[kLambda1]);
  const double eta2 = -std::log(phi[kLambda2]);
  std::vector<double> t_hc(static_cast<std::size_t>(ae0 + ae1 - hosp));
  std::vector<double> t_h(static_cast<std::size_t>(hosp - death));
  for (double& t : t_hc) t = rng.exponential(eta1);
  for (double& t : t_h) t = rng.exponential(eta2);

  data.arrays["x_ae0"] = {static_cast<double>(ae0)};
  data.arrays["x_ae1"] = {static_cast<double>(ae1)};
  data.arrays["x_hosp"] = {static_cast<double>(hosp)};
  data.arrays["x_death"] = {static_cast<double>(death)};
  data.arrays["sum_t_hc"] = {std::accumulate(t_hc.begin(), t_hc.end(), 0.0)};
  data.arrays["sum_t_h"] = {std::accumulate(t_h.begin(), t_h.end(), 0.0)};
  data.arrays["t_hc"] = std::move(t_hc);
  data.arrays["t_h"] = std::move(t_h);
  return data;
}

double ChemotherapyModel::log_kernel(const Dataset& data, std::span<const double> phi) const {
  const double n = static_cast<double>(data.design.n);
  const double pi0 = phi[kPi0], rho = phi[kRho];
  const double g1 = phi[kGamma1] / 15.0, g2 = phi[kGamma2] / 15.0;
  const double l1 = phi[kLambda1], l2 = phi[kLambda2];
  const double p1 = rho * pi0;
  auto inside = [](double p) { return p > 0.0 && p < 1.0; };
  if (!(inside(pi0) && rho > 0.0 && inside(p1) && inside(g1) && inside(g2) && inside(l1) && inside(l2)))
    return kNegInf;
  if (data.empty()) return 0.0;

  const double ae0 = data.scalar("x_ae0"), ae1 = data.scalar("x_ae1");
  const double hosp = data.scalar("x_hosp"), death = data.scalar("x_death");
  const double m_hc = ae0 + ae1 - hosp, m_h = hosp - death;
  const double eta1 = -std::log(l1), eta2 = -std::log(l2);
  return xlogy(ae0, pi0) + xlogy(n - ae0, 1.0 - pi0) + xlogy(ae1, p1) + xlogy(n - ae1, 1.0 - p1) +
         xlogy(hosp, g1) + xlogy(ae0 + ae1 - hosp, 1.0 - g1) + xlogy(death, g2) + xlogy(hosp - death, 1.0 - g2) +
         xlogy(m_hc, eta1) - eta1 * data.scalar("sum_t_hc") + xlogy(m_h, eta2) - eta2 * data.scalar("sum_t_h");
}

double ChemotherapyModel::log_likelihood(const Dataset& data, std::span<const double> phi) const {
  const double kernel = log_kernel(data, phi);
  if (data.empty() || !std::isfinite(kernel)) return kernel;
  const double n = static_cast<double>(data.design.n);
  const double ae0 = data.scalar("x_ae0"), ae1 = data.scalar("x_ae1");
  const double hosp = data.scalar("x_hosp"), death = data.scalar("x_death");
  return kernel + binomial_log_coef(n, ae0) + binomial_log_coef(n, ae1) + binomial_log_coef(ae0 + ae1, hosp) +
         binomial_log_coef(hosp, death);
}

PsaSet ChemotherapyModel::posterior_sample(const Dataset& data, std::size_t count, Rng& rng) const {
  PsaSet prior = sample_prior(count, rng);
  if (data.empty()) return prior;

  // Sampled on (logit pi0, log rho, logit Gamma1, logit Gamma2, logit lambda1, logit lambda2).
  auto to_phi = [](std::span<const double> u, std::span<double> phi) {
    phi[kPi0] = bayes::inv_logit(u[0]);
    phi[kRho] = std::exp(u[1]);
    phi[kGamma1] = bayes::inv_logit(u[2]);
    phi[kGamma2] = bayes::inv_logit(u[3]);
    phi[kLambda1] = bayes::inv_logit(u[4]);
    phi[kLambda2] = bayes::inv_logit(u[5]);
  };
  auto target = [&](std::span<const double> u) {
    std::array<double, 6> phi{};
    to_phi(u, phi);
    if (phi[kGamma1] / 15.0 + phi[kLambda1] > 1.0 || phi[kGamma2] / 15.0 + phi[kLambda2] > 1.0) return kNegInf;
    double lp = log_kernel(data, phi);
    if (!std::isfinite(lp)) return kNegInf;
    lp += u[1] + priors_[kRho].log_density(phi[kRho]);
    for (std::size_t j : {kPi0, kGamma1, kGamma2, kLambda1, kLambda2}) {
      const std::size_t k = j == kPi0 ? 0 : j;
      lp += priors_[j].log_density(phi[j]) + bayes::log_jacobian_logit(u[k]);
    }
    return lp;
  };

  const double n = static_cast<double>(data.design.n);
  const double ae0 = data.scalar("x_ae0"), ae1 = data.scalar("x_ae1");
  // Start near the data where the data are informative, else at the prior mean.
  const double pi0_start = std::clamp((ae0 + priors_[kPi0].a) / (n + priors_[kPi0].a + priors_[kPi0].b), 0.01, 0.99);
  const double rho_start = std::clamp((ae1 + 0.5) / (ae0 + 0.5), 0.05, 0.95 / pi0_start);
  std::vector<double> init{bayes::logit(pi0_start), std::log(rho_start),
                           bayes::logit(priors_[kGamma1].mean()), bayes::logit(priors_[kGamma2].mean()),
                           bayes::logit(priors_[kLambda1].mean()), bayes::logit(priors_[kLambda2].mean())};
  const std::vector<double> sd(6, 0.2);
  const Matrix chain = run_focal_mh(target, init, sd, count, config_.burn_in, rng, "chemotherapy");

  Matrix phi(chain.rows(), 6);
  for (Eigen::Index r = 0; r < chain.rows(); ++r) {
    std::array<double, 6> u{}, p{};
    for (int k = 0; k < 6; ++k) u[static_cast<std::size_t>(k)] = chain(r, k);
    to_phi(u, p);
    for (int k = 0; k < 6; ++k) phi(r, k) = p[static_cast<std::size_t>(k)];
  }
  return with_focal(prior, phi);
}

std::vector<double> ChemotherapyModel::summarize(const Dataset& data) const {
  const double mean_g1 = priors_[kGamma1].mean() / 15.0;
  const double mean_g2 = priors_[kGamma2].mean() / 15.0;
  const double mean_t_hc = 1.0 / -std::log(priors_[kLambda1].mean());
  const double mean_t_h = 1.0 / -std::log(priors_[kLambda2].mean());
  if (data.empty()) {
    imputations_ += 4;
    return {priors_[kPi0].mean(), priors_[kPi0].mean() * priors_[kRho].mean(), mean_g1, mean_g2, mean_t_hc, mean_t_h};
  }
  const double n = static_cast<double>(data.design.n);
  const double ae0 = data.scalar("x_ae0"), ae1 = data.scalar("x_ae1");
  const double hosp = data.scalar("x_hosp"), death = data.scalar("x_death");
  std::size_t imputed = 0;
  auto ratio = [&](double num, double den, double fallback) {
    if (den > 0.0) return num / den;
    ++imputed;
    return fallback;
  };
  auto mean_time = [&](const std::vector<double>& t, double fallback) {
    if (t.empty()) ++imputed;
    return mean_or(t, fallback);
  };
  std::vector<double> out{ae0 / n,
                          ae1 / n,
                          ratio(hosp, ae0 + ae1, mean_g1),
                          ratio(death, hosp, mean_g2),
                          mean_time(data.at("t_hc"), mean_t_hc),
                          mean_time(data.at("t_h"), mean_t_h)};
  imputations_ += imputed;
  return out;
}

}  // namespace voi::models
