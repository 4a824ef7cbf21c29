#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cfmimo/dataset.hpp"
#include "cfmimo/evaluation.hpp"
#include "cfmimo/mlp.hpp"
#include "cfmimo/solvers.hpp"

namespace cfmimo {

// Top-level run configuration shared by the CLI commands. Every section is
// optional and falls back to the documented defaults; unknown keys are
// rejected.
struct RunConfig {
  ScenarioConfig scenario;       // includes system + solver options
  TrainSchedule schedule;
  std::uint64_t init_seed = 2023;
  std::uint64_t shuffle_seed = 17;
  std::string output_dir;        // optional
};

nlohmann::json to_json(const SystemConfig& cfg);
SystemConfig system_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SolverOptions& opt);
SolverOptions solver_options_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainSchedule& sched);
TrainSchedule train_schedule_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SolverReport& report);

/// Debug dump: positions, shadowing draws, pilot Gram, seed.
nlohmann::json to_json(const NetworkRealization& net);

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Parse helper that rejects unknown keys with a ConfigError naming them.
void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& context);

}  // namespace cfmimo
