#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "voi/cli/run.hpp"
#include "voi/errors.hpp"
#include "voi/models/registry.hpp"
#include "voi/parallel.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kEstimatorError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value-of-information analysis: EVPI, EVPPI and EVSI by five estimators"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t thread_count = 0;

  auto* run = app.add_subcommand("run", "run a configured analysis and write evsi.csv, summary.json, plots");
  run->add_option("--config", config_path, "run config (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "master seed (overrides the config)");
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--threads", thread_count, "worker threads, 0 = all cores");

  auto* bench = app.add_subcommand("bench", "time each method once at the first grid size");
  bench->add_option("--config", config_path, "run config (JSON)")->required();
  bench->add_option("--out", out_dir, "also write bench.csv here");
  bench->add_option("--threads", thread_count, "worker threads, 0 = all cores");

  auto* models = app.add_subcommand("models", "model catalogue");
  auto* list = models->add_subcommand("list", "list the bundled models");
  models->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    voi::set_threads(thread_count);
    if (*list) {
      for (const auto& m : voi::models::model_catalog()) std::cout << m.id << "\t" << m.description << "\n";
      return kOk;
    }
    auto config = voi::cli::RunConfig::load(config_path);
    if (*seed_opt) config.seed = seed;
    if (!out_dir.empty()) config.out = out_dir;
    if (*run) {
      const auto result = voi::cli::run_analysis(config);
      voi::cli::write_outputs(config, result);
      std::cout << voi::cli::evsi_csv(result);
      for (const auto& w : result.warnings) std::cerr << "warning [" << w.method << ", n=" << w.n << "]: " << w.message << "\n";
      return kOk;
    }
    if (*bench) {
      const auto rows = voi::cli::run_bench(config);
      const auto csv = voi::cli::bench_csv(config.model, rows);
      std::cout << csv;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "bench.csv") << csv;
      }
      return kOk;
    }
  } catch (const voi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const voi::EstimatorError& e) {
    std::cerr << "estimator error: " << e.what() << "\n";
    return kEstimatorError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEstimatorError;
  }
  return kOk;
}
