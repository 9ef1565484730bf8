#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "voi/core.hpp"
#include "voi/metamodel.hpp"

namespace voi::cli {

struct Budgets {
  std::size_t psa = 10000;
  std::size_t nested_outer = 1000;
  std::size_t nested_inner = 1000;
  std::size_t heath_quantiles = 50;
  std::size_t heath_inner = 1000;
  std::size_t menzies_pool = 0;      // 0: every PSA draw
  std::size_t menzies_datasets = 0;  // 0: the pool size
  std::size_t n0_probe = 0;          // 0: median of the n grid
  std::size_t n0_outer = 500;
  std::size_t n0_inner = 500;
  // Nested MC above this many S*R model evaluations is extrapolated by bench.
  double bench_ceiling = 1e12;
  std::size_t bench_pilot_outer = 20;

  nlohmann::json to_json() const;
};

struct EnbsSettings {
  double population = 0.0;
  double fixed_cost = 0.0;
  double per_patient_cost = 0.0;
};

struct RunConfig {
  std::string model;
  nlohmann::json model_options = nlohmann::json::object();
  std::string base_dir = ".";
  std::vector<Method> methods;
  std::vector<std::size_t> n_grid;
  double wtp = 0.0;
  Budgets budgets;
  std::size_t replicates = 200;
  std::size_t nested_replicates = 1;
  std::uint64_t seed = 1;
  std::string out = "out";
  BasisSpec basis = BasisSpec::spline();
  // Regression on study summaries (Strong); defaults to `basis`.
  std::optional<BasisSpec> strong_basis;
  bool svg = true;
  std::optional<EnbsSettings> enbs;

  // Throws ConfigError with the offending key.
  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static RunConfig load(const std::string& path);
  void validate() const;
};

struct RunWarning {
  std::string method;
  std::size_t n = 0;
  std::string message;
};

struct ResidualRow {
  Method method;
  std::size_t n;
  std::size_t column;
  std::size_t draw;
  double fitted;
  double residual;
};

struct RunResult {
  std::string model;
  double evpi = 0.0;
  double evppi = 0.0;
  double evppi_se = 0.0;
  std::vector<EvsiEstimate> estimates;
  std::vector<RunWarning> warnings;
  std::vector<ResidualRow> residuals;
  nlohmann::json diagnostics = nlohmann::json::object();
};

/// Runs every configured method over the n grid. The PSA sample is drawn once
/// from the master seed; each method gets its own derived stream, so results
/// do not depend on the thread count or on which other methods run.
RunResult run_analysis(const RunConfig& config);

// evsi.csv, summary.json, residuals.csv and (if enabled) evsi_vs_n.svg.
void write_outputs(const RunConfig& config, const RunResult& result);

std::string evsi_csv(const RunResult& result);
nlohmann::json summary_json(const RunConfig& config, const RunResult& result);
std::string evsi_svg(const RunResult& result);

struct BenchRow {
  Method method;
  std::size_t n = 0;
  double seconds = 0.0;
  bool extrapolated = false;
  double value = 0.0;
};

/// One run of each method at the first grid size. Nested MC above the budget
/// ceiling is timed on a pilot of bench_pilot_outer outer draws and scaled
/// linearly in S*R.
std::vector<BenchRow> run_bench(const RunConfig& config);
std::string bench_csv(const std::string& model, const std::vector<BenchRow>& rows);

nlohmann::json versions();

}  // namespace voi::cli
