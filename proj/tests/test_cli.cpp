#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "voi/cli/run.hpp"
#include "voi/errors.hpp"
#include "voi/parallel.hpp"

using namespace voi;
using namespace voi::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json toy_config() {
  return json{{"model", "gaussian_toy"},
              {"model_options", {{"mu0", 0.0}, {"sigma0", 1.0}, {"sigma", 2.0}}},
              {"methods", {"nested_mc", "strong", "menzies", "jalal", "heath"}},
              {"n", {4, 16}},
              {"wtp", 1.0},
              {"budgets",
               {{"psa", 1000}, {"nested_outer", 300}, {"nested_inner", 100}, {"heath_quantiles", 20},
                {"heath_inner", 200}, {"menzies_pool", 500}, {"menzies_datasets", 500}, {"n0_probe", 4},
                {"n0_outer", 200}, {"n0_inner", 100}}},
              {"replicates", 3},
              {"seed", 99}};
}

// Drops the final (wall-clock) column of every row.
std::string without_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("voi_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_voi(const std::string& args) {
  const char* bin = std::getenv("VOI_BIN");
  REQUIRE(bin != nullptr);
  const int status = std::system((std::string(bin) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing") {
  CHECK_NOTHROW(RunConfig::from_json(toy_config()));

  auto j = toy_config();
  j["colour"] = "blue";
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j.erase("model");
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j["methods"] = json::array();
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j["methods"] = {"strong", "laplace"};
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j["n"] = {-4};
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j["budgets"]["psa"] = 0;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j["budgets"]["sheep"] = 3;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j["budgets"]["menzies_pool"] = 5000;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  j = toy_config();
  j["basis"] = {{"kind", "wavelet"}};
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/does/not/exist.json"), ConfigError);
}

TEST_CASE("run writes every output and is reproducible") {
  auto config = RunConfig::from_json(toy_config());
  config.out = scratch("run").string();
  set_threads(1);
  const auto a = run_analysis(config);
  set_threads(3);
  const auto b = run_analysis(config);
  set_threads(0);

  REQUIRE(a.estimates.size() == 10);
  CHECK(without_seconds(evsi_csv(a)) == without_seconds(evsi_csv(b)));
  CHECK(summary_json(config, a).dump() == summary_json(config, b).dump());
  CHECK(evsi_csv(a).rfind("model,method,n,point,lo95,hi95,seconds\n", 0) == 0);
  for (const auto& e : a.estimates) {
    CHECK(e.lo <= e.value);
    CHECK(e.value <= e.hi);
  }

  write_outputs(config, a);
  const fs::path out(config.out);
  for (const char* f : {"evsi.csv", "summary.json", "residuals.csv", "evsi_vs_n.svg"}) CHECK(fs::exists(out / f));
  const auto summary = json::parse(read_file(out / "summary.json"));
  for (const char* key : {"evpi", "evppi", "budgets", "seed", "versions", "warnings", "estimates"})
    CHECK(summary.contains(key));
  CHECK(summary["seed"] == 99);
  CHECK(read_file(out / "evsi_vs_n.svg").find("<svg") != std::string::npos);
}

TEST_CASE("estimator warnings reach summary.json verbatim") {
  auto j = toy_config();
  j["methods"] = {"menzies"};
  j["n"] = {20000};
  j["budgets"]["menzies_pool"] = 1000;
  auto config = RunConfig::from_json(j);
  const auto r = run_analysis(config);
  REQUIRE_FALSE(r.estimates[0].warnings.empty());
  const auto summary = summary_json(config, r);
  REQUIRE(summary["warnings"].size() >= 1);
  bool found = false;
  for (const auto& w : summary["warnings"])
    found = found || w["message"].get<std::string>() == r.estimates[0].warnings[0];
  CHECK(found);
}

TEST_CASE("enbs in the summary") {
  auto j = toy_config();
  j["methods"] = {"jalal"};
  j["enbs"] = {{"population", 1000.0}, {"fixed_cost", 50.0}, {"per_patient_cost", 1.0}};
  auto config = RunConfig::from_json(j);
  const auto r = run_analysis(config);
  const auto summary = summary_json(config, r);
  REQUIRE(summary.contains("enbs"));
  const auto& row = summary["enbs"][0];
  CHECK(row["enbs"].get<double>() ==
        doctest::Approx(r.estimates[0].value * 1000.0 - 50.0 - 1.0 * static_cast<double>(r.estimates[0].n)));
}

TEST_CASE("chronic pain grid gives twenty rows") {
  json j{{"model", "chronic_pain"},
         {"methods", {"strong", "menzies", "jalal", "heath"}},
         {"n", {10, 25, 50, 100, 150}},
         {"wtp", 20000.0},
         {"budgets",
          {{"psa", 1000}, {"heath_quantiles", 10}, {"heath_inner", 200}, {"menzies_pool", 300},
           {"menzies_datasets", 300}, {"n0_probe", 30}, {"n0_outer", 50}, {"n0_inner", 200}}},
         {"replicates", 2},
         {"seed", 5}};
  const auto r = run_analysis(RunConfig::from_json(j));
  CHECK(r.estimates.size() == 20);
}

TEST_CASE("bench marks extrapolated nested mc") {
  auto j = toy_config();
  j["budgets"]["bench_ceiling"] = 0.0;
  j["budgets"]["bench_pilot_outer"] = 20;
  const auto rows = run_bench(RunConfig::from_json(j));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].method == Method::nested_mc);
  CHECK(rows[0].extrapolated);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK_FALSE(rows[i].extrapolated);
  const auto csv = bench_csv("gaussian_toy", rows);
  CHECK(csv.find("extrapolated") != std::string::npos);
}

TEST_CASE("nested mc bench time grows with S") {
  auto j = toy_config();
  j["methods"] = {"nested_mc"};
  j["budgets"]["nested_inner"] = 200;
  std::vector<double> seconds;
  for (int s : {200, 800, 3200}) {
    j["budgets"]["nested_outer"] = s;
    seconds.push_back(run_bench(RunConfig::from_json(j))[0].seconds);
  }
  CHECK(seconds[0] < seconds[1]);
  CHECK(seconds[1] < seconds[2]);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_voi("models list") == 0);

  std::ofstream(dir / "bad.json") << R"({"model": "gaussian_toy", "methods": ["strong"], "n": [4]})";
  CHECK(run_voi("run --config " + (dir / "bad.json").string()) == 1);
  CHECK(run_voi("run --config " + (dir / "missing.json").string()) == 1);
  CHECK(run_voi("run") == 1);

  // A PSA too small for the regression basis fails inside the estimator.
  auto j = toy_config();
  j["methods"] = {"strong"};
  j["budgets"] = {{"psa", 8}, {"menzies_pool", 8}, {"menzies_datasets", 8}};
  std::ofstream(dir / "tiny.json") << j.dump();
  CHECK(run_voi("run --config " + (dir / "tiny.json").string() + " --out " + (dir / "tiny").string()) == 2);

  std::ofstream(dir / "ok.json") << toy_config().dump();
  CHECK(run_voi("run --config " + (dir / "ok.json").string() + " --out " + (dir / "a").string() + " --threads 1") == 0);
  CHECK(run_voi("run --config " + (dir / "ok.json").string() + " --out " + (dir / "b").string() + " --threads 2") == 0);
  CHECK(without_seconds(read_file(dir / "a" / "evsi.csv")) == without_seconds(read_file(dir / "b" / "evsi.csv")));
  CHECK(read_file(dir / "a" / "summary.json") == read_file(dir / "b" / "summary.json"));
}
