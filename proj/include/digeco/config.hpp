#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "digeco/augment.hpp"
#include "digeco/ecosystem.hpp"
#include "digeco/evolution.hpp"

namespace digeco {

struct GridSpec {
  std::vector<double> mutations;
  std::vector<double> crossovers;
};

// Everything a scenario run depends on. Serialises to JSON and back; the
// reader rejects unknown keys.
struct RunConfig {
  std::string scenario;
  std::uint64_t seed = 1;
  std::size_t runs = 100;
  std::size_t runs_per_cell = 30;  // stability-grid
  int workers = 0;                 // 0: available parallelism
  std::string output_dir;          // empty: SIM_OUTPUT_DIR, then ./out

  // Ecosystem scenarios.
  std::size_t events = 1000;
  std::size_t window = 100;
  std::size_t early_event = 100;  // diversity: first sample point

  // Population scenarios.
  int generations = 1000;
  int sample_every = 10;
  int cluster_keys = 4;
  int catalyst_horizon = 2000;

  EcosystemParams ecosystem;
  EvolutionParams evolution;
  CatalystConfig catalyst;
  TargetedMigrationConfig targeted;
  GridSpec grid;
  // targeted-migration arms to run; empty means all four.
  std::vector<std::string> arms;
  // Cap on runs of the mlp arm, 0 for no cap. It is far slower than the rest.
  std::size_t mlp_runs = 0;

  // Throws Error(Config) naming the offending key.
  void validate() const;
};

const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

// Scenario presets over the library defaults. Throws UnknownScenario.
RunConfig default_config(const std::string& scenario);

// Overwrites the fields present in `j`. Unknown keys, wrong types and bad
// enum names throw Error(Config) with the JSON path in the message.
void merge_config(RunConfig& cfg, const nlohmann::json& j);

// Reads a config file. When it names a scenario, its presets come first.
// Throws Error(Config) on unreadable files and parse errors.
nlohmann::json read_config_file(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

// FNV-1a over the compact JSON dump.
std::uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const RunConfig& cfg);

}  // namespace digeco
