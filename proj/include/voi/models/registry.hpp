#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "voi/core.hpp"

namespace voi::models {

struct ModelInfo {
  std::string id;
  std::string description;
};

const std::vector<ModelInfo>& model_catalog();

// Directory holding the bundled model configs and age table.
std::string data_dir();

/// Builds a model by id. `options` holds model-specific settings; a "config"
/// entry naming a JSON file is resolved against `base_dir`.
///
///   gaussian_toy: mu0, sigma0, sigma
///   chemotherapy: the ChemotherapyConfig fields
///   chronic_pain: config (default bundled file), summary ("geometric" | "arithmetic")
///   crc:          config (default bundled file)
///
/// Throws ConfigError for unknown ids or bad options.
std::unique_ptr<DecisionModel> make_model(const std::string& id, const nlohmann::json& options = nlohmann::json::object(),
                                          const std::string& base_dir = ".");

}  // namespace voi::models
