#include "voi/models/registry.hpp"

#include <cstdlib>
#include <filesystem>

#include "voi/models/chemotherapy.hpp"
#include "voi/models/chronic_pain.hpp"
#include "voi/models/crc.hpp"
#include "voi/models/gaussian_toy.hpp"

#ifndef VOI_DATA_DIR
#define VOI_DATA_DIR "data"
#endif

namespace voi::models {
namespace {

std::string resolve(const nlohmann::json& options, const std::string& base_dir, const std::string& fallback) {
  if (!options.contains("config")) return (std::filesystem::path(data_dir()) / fallback).string();
  const std::filesystem::path p = options.at("config").get<std::string>();
  return p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

const std::vector<ModelInfo>& model_catalog() {
  static const std::vector<ModelInfo> catalog{
      {"chemotherapy", "adverse events of chemotherapy; 4-state daily Markov model, 6 trial-informed parameters"},
      {"chronic_pain", "first-line chronic pain treatment; 10-state monthly Markov model, 2 QoL weights"},
      {"crc", "colorectal cancer screening; Weibull adenoma onset from a prevalence study"},
      {"gaussian_toy", "conjugate normal model with closed-form EVSI"},
  };
  return catalog;
}

std::string data_dir() {
  if (const char* env = std::getenv("VOI_DATA_DIR")) return env;
  return VOI_DATA_DIR;
}

std::unique_ptr<DecisionModel> make_model(const std::string& id, const nlohmann::json& options,
                                          const std::string& base_dir) {
  try {
    if (id == "gaussian_toy") {
      return std::make_unique<GaussianToy>(options.value("mu0", 0.0), options.value("sigma0", 1.0),
                                           options.value("sigma", 2.0));
    }
    if (id == "chemotherapy") return std::make_unique<ChemotherapyModel>(ChemotherapyConfig::from_json(options));
    if (id == "chronic_pain") {
      const auto summary = options.value("summary", std::string("geometric"));
      if (summary != "geometric" && summary != "arithmetic")
        throw ConfigError("chronic_pain: summary must be 'geometric' or 'arithmetic'");
      return std::make_unique<ChronicPainModel>(ChronicPainConfig::load(resolve(options, base_dir, "chronic_pain.json")),
                                                summary == "geometric" ? PainSummary::geometric : PainSummary::arithmetic);
    }
    if (id == "crc") return CrcModel::load(resolve(options, base_dir, "crc.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model options for " + id + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model " + id + ": " + e.what());
  }
  std::string known;
  for (const auto& m : model_catalog()) known += (known.empty() ? "" : ", ") + m.id;
  throw ConfigError("unknown model '" + id + "' (known: " + known + ")");
}

}  // namespace voi::models
