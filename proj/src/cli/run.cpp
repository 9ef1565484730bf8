#include "voi/cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <gsl/gsl_version.h>

#include "voi/estimators.hpp"
#include "voi/models/chemotherapy.hpp"
#include "voi/models/chronic_pain.hpp"
#include "voi/models/crc.hpp"
#include "voi/models/registry.hpp"
#include "voi/parallel.hpp"

#ifndef VOI_VERSION
#define VOI_VERSION "0.0.0"
#endif

namespace voi::cli {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t positive(const json& j, const std::string& key, std::size_t fallback, bool allow_zero = false) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0 || (!allow_zero && v.get<long long>() == 0))
    throw ConfigError("'" + key + "' must be a " + (allow_zero ? "non-negative" : "positive") + " integer");
  return v.get<std::size_t>();
}

BasisSpec basis_from_json(const json& j) {
  const auto kind = j.value("kind", std::string("spline"));
  if (kind == "linear") return BasisSpec::linear();
  if (kind != "spline") throw ConfigError("basis.kind must be 'linear' or 'spline'");
  const int degree = j.value("degree", 3);
  const int knots = j.value("knots", 5);
  if (degree < 1 || knots < 0) throw ConfigError("basis: degree >= 1 and knots >= 0 required");
  auto spec = BasisSpec::spline(degree, knots);
  if (j.contains("interactions"))
    for (const auto& pair : j.at("interactions")) {
      const auto a = pair.at(0).get<std::size_t>(), b = pair.at(1).get<std::size_t>();
      if (a == b) throw ConfigError("basis: an interaction needs two distinct covariates");
      spec.interactions.emplace_back(a, b);
    }
  return spec;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::size_t n0_probe(const RunConfig& c) {
  if (c.budgets.n0_probe) return c.budgets.n0_probe;
  std::vector<std::size_t> grid = c.n_grid;
  std::sort(grid.begin(), grid.end());
  return std::max<std::size_t>(1, grid[grid.size() / 2]);
}

// Runs `reps` replicates of a procedure that yields one estimate per grid size.
std::vector<EvsiEstimate> replicate_over_grid(
    std::size_t reps, std::size_t grid_size, const Rng& base,
    const std::function<std::vector<EvsiEstimate>(std::size_t, Rng&)>& body) {
  std::vector<std::vector<EvsiEstimate>> runs(reps);
  parallel_for(reps, [&](std::size_t i) {
    Rng r = base.stream(i);
    runs[i] = body(i, r);
  });
  std::vector<EvsiEstimate> out;
  for (std::size_t k = 0; k < grid_size; ++k) {
    std::vector<EvsiEstimate> column;
    for (const auto& run : runs) column.push_back(run.at(k));
    out.push_back(combine_replicates(column));
  }
  return out;
}

void add_fit_residuals(RunResult& result, Method method, std::size_t n, const std::vector<MetaModelFit>& fits) {
  for (std::size_t t = 0; t < fits.size(); ++t)
    for (Eigen::Index s = 0; s < fits[t].fitted.size(); ++s)
      result.residuals.push_back({method, n, t, static_cast<std::size_t>(s), fits[t].fitted(s), fits[t].residuals(s)});
}

void add_model_diagnostics(const DecisionModel& model, RunResult& result) {
  if (const auto* m = dynamic_cast<const models::ChemotherapyModel*>(&model)) {
    result.diagnostics["prior_rejections"] = m->rejections();
    result.diagnostics["summary_imputations"] = m->imputations();
  } else if (const auto* m = dynamic_cast<const models::ChronicPainModel*>(&model)) {
    result.diagnostics["prior_rejections"] = m->rejections();
    result.diagnostics["summary_imputations"] = m->imputations();
  } else if (const auto* m = dynamic_cast<const models::CrcModel*>(&model)) {
    result.diagnostics["penalised_mle"] = m->penalised();
    result.diagnostics["mle_fallbacks"] = m->fallbacks();
  }
}

}  // namespace

json Budgets::to_json() const {
  return {{"psa", psa},
          {"nested_outer", nested_outer},
          {"nested_inner", nested_inner},
          {"heath_quantiles", heath_quantiles},
          {"heath_inner", heath_inner},
          {"menzies_pool", menzies_pool},
          {"menzies_datasets", menzies_datasets},
          {"n0_probe", n0_probe},
          {"n0_outer", n0_outer},
          {"n0_inner", n0_inner},
          {"bench_ceiling", bench_ceiling},
          {"bench_pilot_outer", bench_pilot_outer}};
}

RunConfig RunConfig::from_json(const json& j, const std::string& base_dir) {
  static const std::set<std::string> known{"model", "model_options", "methods", "n", "wtp", "budgets", "replicates",
                                           "nested_replicates", "seed", "out", "basis", "strong_basis", "svg", "enbs"};
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown run config key '" + key + "'");

  RunConfig c;
  c.base_dir = base_dir;
  try {
    c.model = j.at("model").get<std::string>();
    if (j.contains("model_options")) c.model_options = j.at("model_options");
    for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
    for (const auto& n : j.at("n")) {
      if (!n.is_number_integer() || n.get<long long>() < 0) throw ConfigError("'n' entries must be non-negative integers");
      c.n_grid.push_back(n.get<std::size_t>());
    }
    c.wtp = j.at("wtp").get<double>();
    if (j.contains("budgets")) {
      const auto& b = j.at("budgets");
      static const std::set<std::string> budget_keys{
          "psa", "nested_outer", "nested_inner", "heath_quantiles", "heath_inner", "menzies_pool",
          "menzies_datasets", "n0_probe", "n0_outer", "n0_inner", "bench_ceiling", "bench_pilot_outer"};
      for (const auto& [key, _] : b.items())
        if (!budget_keys.count(key)) throw ConfigError("unknown budget '" + key + "'");
      auto& d = c.budgets;
      d.psa = positive(b, "psa", d.psa);
      d.nested_outer = positive(b, "nested_outer", d.nested_outer);
      d.nested_inner = positive(b, "nested_inner", d.nested_inner);
      d.heath_quantiles = positive(b, "heath_quantiles", d.heath_quantiles);
      d.heath_inner = positive(b, "heath_inner", d.heath_inner);
      d.menzies_pool = positive(b, "menzies_pool", d.menzies_pool, true);
      d.menzies_datasets = positive(b, "menzies_datasets", d.menzies_datasets, true);
      d.n0_probe = positive(b, "n0_probe", d.n0_probe, true);
      d.n0_outer = positive(b, "n0_outer", d.n0_outer);
      d.n0_inner = positive(b, "n0_inner", d.n0_inner);
      d.bench_ceiling = b.value("bench_ceiling", d.bench_ceiling);
      d.bench_pilot_outer = positive(b, "bench_pilot_outer", d.bench_pilot_outer);
    }
    c.replicates = positive(j, "replicates", c.replicates);
    c.nested_replicates = positive(j, "nested_replicates", c.nested_replicates);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.out = j.value("out", c.out);
    if (j.contains("basis")) c.basis = basis_from_json(j.at("basis"));
    if (j.contains("strong_basis")) c.strong_basis = basis_from_json(j.at("strong_basis"));
    c.svg = j.value("svg", c.svg);
    if (j.contains("enbs")) {
      const auto& e = j.at("enbs");
      c.enbs = EnbsSettings{e.at("population").get<double>(), e.value("fixed_cost", 0.0),
                            e.value("per_patient_cost", 0.0)};
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("run config '" + path + "': " + e.what());
  }
  auto dir = std::filesystem::path(path).parent_path();
  return from_json(j, dir.empty() ? "." : dir.string());
}

void RunConfig::validate() const {
  if (model.empty()) throw ConfigError("run config: 'model' is required");
  if (methods.empty()) throw ConfigError("run config: 'methods' must be non-empty");
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size())
    throw ConfigError("run config: duplicate method");
  if (n_grid.empty()) throw ConfigError("run config: 'n' must be non-empty");
  if (!(wtp >= 0.0)) throw ConfigError("run config: 'wtp' must be non-negative");
  if (budgets.heath_quantiles < 3) throw ConfigError("run config: heath_quantiles must be at least 3");
  if (budgets.nested_inner < 2 || budgets.heath_inner < 2 || budgets.n0_inner < 2 || budgets.n0_outer < 2)
    throw ConfigError("run config: inner budgets must be at least 2");
  if (budgets.menzies_pool > budgets.psa || budgets.menzies_datasets > budgets.psa)
    throw ConfigError("run config: Menzies budgets cannot exceed the PSA size");
  if (budgets.bench_ceiling < 0.0) throw ConfigError("run config: bench_ceiling must be non-negative");
  if (enbs && !(enbs->population >= 0.0 && enbs->fixed_cost >= 0.0 && enbs->per_patient_cost >= 0.0))
    throw ConfigError("run config: enbs settings must be non-negative");
}

RunResult run_analysis(const RunConfig& config) {
  config.validate();
  const auto model = models::make_model(config.model, config.model_options, config.base_dir);
  const auto& b = config.budgets;
  const auto& grid = config.n_grid;

  RunResult result;
  result.model = model->name();
  Rng master(config.seed);
  Rng psa_rng = master.stream(0);
  const PsaSet psa = model->sample_prior(b.psa, psa_rng);
  const NetBenefitTable nb = compute_nb_table(*model, psa, config.wtp);
  const IncrementalNbTable inb = incremental(nb);
  result.evpi = evpi(nb);
  const EvppiResult ev = evppi_regression(inb, psa, config.basis);
  result.evppi = ev.value;
  result.evppi_se = ev.se;

  for (const Method method : config.methods) {
    const Rng base = master.stream(1 + static_cast<std::uint64_t>(method));
    std::vector<EvsiEstimate> rows;
    switch (method) {
      case Method::nested_mc:
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const StudyDesign design = model->design(grid[k]);
          rows.push_back(replicate_over_grid(config.nested_replicates, 1, base.stream(k), [&](std::size_t, Rng& r) {
            return std::vector{evsi_nested_mc(*model, design, b.nested_outer, b.nested_inner, config.wtp, r)};
          }).front());
        }
        break;
      case Method::strong:
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const StudyDesign design = model->design(grid[k]);
          std::vector<MetaModelFit> fits;
          rows.push_back(replicate_over_grid(config.replicates, 1, base.stream(k), [&](std::size_t i, Rng& r) {
            return std::vector{evsi_strong(*model, psa, inb, design, config.strong_basis.value_or(config.basis), r, {}, i == 0 ? &fits : nullptr)};
          }).front());
          add_fit_residuals(result, Method::strong, grid[k], fits);
        }
        break;
      case Method::menzies: {
        MenziesOptions options;
        options.pool = b.menzies_pool;
        options.datasets = b.menzies_datasets;
        std::vector<double> mean_ess(grid.size(), 0.0);
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const StudyDesign design = model->design(grid[k]);
          rows.push_back(replicate_over_grid(config.replicates, 1, base.stream(k), [&](std::size_t i, Rng& r) {
            auto m = evsi_menzies(ev.mu_phi, *model, psa, design, options, r);
            if (i == 0) mean_ess[k] = m.mean_ess;
            return std::vector{std::move(m.estimate)};
          }).front());
        }
        result.diagnostics["menzies_mean_ess_first_replicate"] = mean_ess;
        break;
      }
      case Method::jalal: {
        const std::size_t probe = n0_probe(config);
        std::vector<N0Estimate> first(1);
        rows = replicate_over_grid(config.replicates, grid.size(), base, [&](std::size_t i, Rng& r) {
          const auto start = Clock::now();
          const N0Estimate n0 = estimate_n0_nested(*model, probe, b.n0_outer, b.n0_inner, r);
          const double shared = seconds_since(start) / static_cast<double>(grid.size());
          if (i == 0) first[0] = n0;
          std::vector<EvsiEstimate> out;
          for (auto n : grid) {
            auto e = evsi_jalal(ev.fits, inb, static_cast<double>(n), n0);
            e.seconds += shared;
            out.push_back(std::move(e));
          }
          return out;
        });
        result.diagnostics["jalal_n0_probe"] = probe;
        result.diagnostics["jalal_n0_first_replicate"] = first[0].n0;
        add_fit_residuals(result, Method::jalal, 0, ev.fits);
        break;
      }
      case Method::heath: {
        std::vector<HeathCurve> first(1);
        rows = replicate_over_grid(config.replicates, grid.size(), base, [&](std::size_t i, Rng& r) {
          const auto start = Clock::now();
          const HeathCurve curve =
              heath_variance_across_n(*model, psa, inb, ev.mu_phi, grid, b.heath_quantiles, b.heath_inner, r);
          const double shared = seconds_since(start) / static_cast<double>(grid.size());
          if (i == 0) first[0] = curve;
          std::vector<EvsiEstimate> out;
          for (auto n : grid) {
            auto e = evsi_heath(ev.mu_phi, curve.at(static_cast<double>(n)), inb);
            e.n = n;
            e.seconds += shared;
            e.warnings.insert(e.warnings.begin(), curve.warnings.begin(), curve.warnings.end());
            out.push_back(std::move(e));
          }
          return out;
        });
        result.diagnostics["heath_sigma2_max_first_replicate"] = first[0].sigma2_max();
        result.diagnostics["heath_nu_first_replicate"] = first[0].nu();
        break;
      }
    }
    for (auto& e : rows) {
      for (const auto& w : e.warnings) result.warnings.push_back({to_string(method), e.n, w});
      result.estimates.push_back(std::move(e));
    }
  }
  add_model_diagnostics(*model, result);
  return result;
}

std::string evsi_csv(const RunResult& result) {
  std::ostringstream out;
  out << "model,method,n,point,lo95,hi95,seconds\n";
  for (const auto& e : result.estimates) {
    char seconds[32];
    std::snprintf(seconds, sizeof seconds, "%.4f", e.seconds);
    out << result.model << ',' << to_string(e.method) << ',' << e.n << ',' << format_number(e.value) << ','
        << format_number(e.lo) << ',' << format_number(e.hi) << ',' << seconds << '\n';
  }
  return out.str();
}

json versions() {
  return {{"voi", VOI_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"gsl", GSL_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

json summary_json(const RunConfig& config, const RunResult& result) {
  json s;
  s["model"] = result.model;
  s["seed"] = config.seed;
  s["wtp"] = config.wtp;
  s["evpi"] = result.evpi;
  s["evppi"] = {{"value", result.evppi}, {"se", result.evppi_se}};
  s["budgets"] = config.budgets.to_json();
  s["replicates"] = config.replicates;
  s["nested_replicates"] = config.nested_replicates;
  s["n_grid"] = config.n_grid;
  json methods = json::array();
  for (auto m : config.methods) methods.push_back(to_string(m));
  s["methods"] = methods;
  s["versions"] = versions();
  json estimates = json::array();
  for (const auto& e : result.estimates)
    estimates.push_back({{"method", to_string(e.method)},
                         {"n", e.n},
                         {"point", e.value},
                         {"lo95", e.lo},
                         {"hi95", e.hi},
                         {"se", e.se},
                         {"replicate_sd", e.replicate_sd},
                         {"replicates", e.replicates}});
  s["estimates"] = estimates;
  json warnings = json::array();
  for (const auto& w : result.warnings) warnings.push_back({{"method", w.method}, {"n", w.n}, {"message", w.message}});
  s["warnings"] = warnings;
  if (config.enbs) {
    json rows = json::array();
    for (const auto& e : result.estimates) {
      const double cost = config.enbs->fixed_cost + config.enbs->per_patient_cost * static_cast<double>(e.n);
      rows.push_back({{"method", to_string(e.method)}, {"n", e.n}, {"study_cost", cost},
                      {"enbs", enbs(e.value, config.enbs->population, cost)}});
    }
    s["enbs"] = rows;
  }
  s["diagnostics"] = result.diagnostics;
  return s;
}

std::string evsi_svg(const RunResult& result) {
  constexpr double width = 720, height = 440, left = 70, right = 170, top = 30, bottom = 50;
  static const char* colours[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e"};
  std::set<std::size_t> ns;
  double ymax = result.evppi;
  for (const auto& e : result.estimates) {
    ns.insert(e.n);
    ymax = std::max({ymax, e.value, e.hi});
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.05;
  const double nmin = static_cast<double>(*ns.begin()), nmax = static_cast<double>(*ns.rbegin());
  const bool log_x = nmin > 0.0 && nmax / nmin > 20.0;
  auto xpos = [&](double n) {
    if (nmax == nmin) return left + 0.5 * (width - left - right);
    const double f = log_x ? std::log(n / nmin) / std::log(nmax / nmin) : (n - nmin) / (nmax - nmin);
    return left + f * (width - left - right);
  };
  auto ypos = [&](double v) { return height - bottom - (v / ymax) * (height - top - bottom); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  for (auto n : ns)
    svg << "<text x=\"" << xpos(static_cast<double>(n)) << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\">" << n << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << ypos(v) + 4 << "\" text-anchor=\"end\">" << format_number(v)
        << "</text>\n";
  }
  svg << "<text x=\"" << 0.5 * (left + width - right) << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">sample size n" << (log_x ? " (log scale)" : "") << "</text>\n";
  svg << "<text x=\"16\" y=\"" << 0.5 * height << "\" transform=\"rotate(-90 16 " << 0.5 * height
      << ")\" text-anchor=\"middle\">EVSI</text>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << ypos(result.evppi) << "\" x2=\"" << width - right << "\" y2=\""
      << ypos(result.evppi) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  std::vector<Method> order;
  for (const auto& e : result.estimates)
    if (std::find(order.begin(), order.end(), e.method) == order.end()) order.push_back(e.method);
  for (std::size_t m = 0; m < order.size(); ++m) {
    const char* colour = colours[m % 5];
    std::vector<const EvsiEstimate*> pts;
    for (const auto& e : result.estimates)
      if (e.method == order[m]) pts.push_back(&e);
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->n < b->n; });
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (auto* p : pts) svg << xpos(static_cast<double>(p->n)) << ',' << ypos(p->value) << ' ';
    svg << "\"/>\n";
    for (auto* p : pts) {
      const double x = xpos(static_cast<double>(p->n));
      svg << "<line x1=\"" << x << "\" y1=\"" << ypos(std::max(0.0, p->lo)) << "\" x2=\"" << x << "\" y2=\""
          << ypos(p->hi) << "\" stroke=\"" << colour << "\"/>\n";
      svg << "<circle cx=\"" << x << "\" cy=\"" << ypos(p->value) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    }
    const double ly = top + 16.0 * static_cast<double>(m);
    svg << "<line x1=\"" << width - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 32 << "\" y2=\""
        << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << width - right + 38 << "\" y=\"" << ly + 4 << "\">" << to_string(order[m]) << "</text>\n";
  }
  const double ly = top + 16.0 * static_cast<double>(order.size());
  svg << "<line x1=\"" << width - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 32 << "\" y2=\""
      << ly << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << width - right + 38 << "\" y=\"" << ly + 4 << "\">EVPPI</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_outputs(const RunConfig& config, const RunResult& result) {
  const std::filesystem::path dir = config.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out << content;
  };
  write("evsi.csv", evsi_csv(result));
  write("summary.json", summary_json(config, result).dump(2) + "\n");
  if (!result.residuals.empty()) {
    std::ostringstream res;
    res << "method,n,column,draw,fitted,residual\n";
    for (const auto& r : result.residuals)
      res << to_string(r.method) << ',' << r.n << ',' << r.column << ',' << r.draw << ',' << format_number(r.fitted)
          << ',' << format_number(r.residual) << '\n';
    write("residuals.csv", res.str());
  }
  if (config.svg) write("evsi_vs_n.svg", evsi_svg(result));
}

std::vector<BenchRow> run_bench(const RunConfig& config) {
  config.validate();
  const auto model = models::make_model(config.model, config.model_options, config.base_dir);
  const auto& b = config.budgets;
  const std::size_t n = config.n_grid.front();
  const StudyDesign design = model->design(n);

  Rng master(config.seed);
  Rng psa_rng = master.stream(0);
  const PsaSet psa = model->sample_prior(b.psa, psa_rng);
  const IncrementalNbTable inb = incremental(compute_nb_table(*model, psa, config.wtp));

  std::vector<BenchRow> rows;
  for (const Method method : config.methods) {
    Rng r = master.stream(1 + static_cast<std::uint64_t>(method));
    BenchRow row{method, n, 0.0, false, 0.0};
    const auto start = Clock::now();
    switch (method) {
      case Method::nested_mc: {
        const double evaluations = static_cast<double>(b.nested_outer) * static_cast<double>(b.nested_inner);
        if (evaluations <= b.bench_ceiling) {
          row.value = evsi_nested_mc(*model, design, b.nested_outer, b.nested_inner, config.wtp, r).value;
          row.seconds = seconds_since(start);
        } else {
          const std::size_t pilot = std::max<std::size_t>(2, std::min(b.bench_pilot_outer, b.nested_outer));
          row.value = evsi_nested_mc(*model, design, pilot, b.nested_inner, config.wtp, r).value;
          row.seconds = seconds_since(start) * static_cast<double>(b.nested_outer) / static_cast<double>(pilot);
          row.extrapolated = true;
        }
        break;
      }
      case Method::strong:
        row.value = evsi_strong(*model, psa, inb, design, config.strong_basis.value_or(config.basis), r).value;
        break;
      case Method::menzies: {
        const auto ev = evppi_regression(inb, psa, config.basis);
        MenziesOptions options;
        options.pool = b.menzies_pool;
        options.datasets = b.menzies_datasets;
        row.value = evsi_menzies(ev.mu_phi, *model, psa, design, options, r).estimate.value;
        break;
      }
      case Method::jalal: {
        const auto ev = evppi_regression(inb, psa, config.basis);
        const auto n0 = estimate_n0_nested(*model, n0_probe(config), b.n0_outer, b.n0_inner, r);
        row.value = evsi_jalal(ev.fits, inb, static_cast<double>(n), n0).value;
        break;
      }
      case Method::heath: {
        const auto ev = evppi_regression(inb, psa, config.basis);
        const auto var = heath_preposterior_variance(*model, psa, inb, ev.mu_phi, design, b.heath_quantiles,
                                                     b.heath_inner, r);
        row.value = evsi_heath(ev.mu_phi, var.sigma2, inb).value;
        break;
      }
    }
    if (!row.extrapolated) row.seconds = seconds_since(start);
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::string& model, const std::vector<BenchRow>& rows) {
  double nested = 0.0;
  for (const auto& r : rows)
    if (r.method == Method::nested_mc) nested = r.seconds;
  std::ostringstream out;
  out << "model,method,n,seconds,speedup_vs_nested_mc,extrapolated,evsi\n";
  for (const auto& r : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", r.seconds);
    out << model << ',' << to_string(r.method) << ',' << r.n << ',' << buf << ',';
    if (nested > 0.0 && r.seconds > 0.0) out << format_number(nested / r.seconds);
    else out << "NA";
    out << ',' << (r.extrapolated ? "yes" : "no") << ',' << format_number(r.value) << '\n';
  }
  return out.str();
}

}  // namespace voi::cli
