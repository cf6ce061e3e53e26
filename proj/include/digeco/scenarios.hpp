#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "digeco/config.hpp"

namespace digeco {

// The report body is a pure function of the config; wall-clock data goes to
// the metadata only.
struct ScenarioReport {
  nlohmann::json body;
  std::map<std::string, std::string> csv;  // file name -> contents
};

// Seed of run `run` under a base seed.
std::uint64_t run_seed(std::uint64_t base, std::size_t run);

// Throws UnknownScenario, or Error(Config) when the config is invalid.
ScenarioReport run_scenario(const RunConfig& cfg);

// Writes report.json, metadata.json and the CSV files into `dir`, creating it.
// Returns the report path.
std::string write_report(const ScenarioReport& r, const RunConfig& cfg, const std::string& dir,
                         double elapsed_seconds);

}  // namespace digeco
