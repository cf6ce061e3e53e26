// Batch driver for the scenario runners.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "digeco/config.hpp"
#include "digeco/parallel.hpp"
#include "digeco/scenarios.hpp"

using namespace digeco;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kConfig = 2;

struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> runs_per_cell;
  std::optional<int> workers;
  std::string output;
  std::string config;
};

// Scenario presets, then the file, then the flags.
RunConfig build(const std::string& scenario, const Flags& f) {
  RunConfig cfg = default_config(scenario);
  if (!f.config.empty()) {
    auto j = read_config_file(f.config);
    if (j.is_object() && j.contains("scenario") && j["scenario"].is_string() && j["scenario"] != scenario)
      throw Error(Errc::Config, f.config + ": scenario '" + j["scenario"].get<std::string>() +
                                    "' does not match the subcommand '" + scenario + "'");
    try {
      merge_config(cfg, j);
    } catch (const Error& e) {
      throw Error(Errc::Config, f.config + ": " + e.what());
    }
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.runs_per_cell) cfg.runs_per_cell = *f.runs_per_cell;
  if (f.workers) cfg.workers = *f.workers;
  if (!f.output.empty()) cfg.output_dir = f.output;
  cfg.validate();
  return cfg;
}

std::string output_dir(const RunConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  const char* env = std::getenv("SIM_OUTPUT_DIR");
  const std::string root = env && *env ? env : "out";
  return (std::filesystem::path(root) / cfg.scenario).string();
}

int run(const std::string& scenario, const Flags& f) {
  const RunConfig cfg = build(scenario, f);
  set_worker_count(cfg.workers);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_scenario(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto path = write_report(rep, cfg, output_dir(cfg), secs);
  std::cout << path << '\n' << rep.body["summary"].dump(2) << '\n';
  return kOk;
}

int validate(const std::string& path) {
  auto j = read_config_file(path);
  std::string scenario = "succession";
  if (j.is_object() && j.contains("scenario") && j["scenario"].is_string()) scenario = j["scenario"];
  if (!is_scenario(scenario)) throw Error(Errc::Config, path + ": scenario: unknown scenario '" + scenario + "'");
  RunConfig cfg = default_config(scenario);
  try {
    merge_config(cfg, j);
    cfg.validate();
  } catch (const Error& e) {
    throw Error(Errc::Config, path + ": " + e.what());
  }
  std::cout << path << ": ok (" << cfg.scenario << ", config " << config_hash(cfg) << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital ecosystem simulator"};
  app.require_subcommand(1);
  Flags flags;
  std::string validate_path;

  for (const auto& name : scenario_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->add_option("--seed", flags.seed, "base seed");
    sub->add_option("--runs", flags.runs, "independent runs");
    sub->add_option("--runs-per-cell", flags.runs_per_cell, "runs per grid cell (stability-grid)");
    sub->add_option("--workers", flags.workers, "worker threads, 0 for all cores");
    sub->add_option("--output", flags.output, "output directory");
    sub->add_option("--config", flags.config, "JSON config file");
  }
  auto* val = app.add_subcommand("validate-config", "check a config file");
  val->add_option("path", validate_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (val->parsed()) return validate(validate_path);
    for (auto* sub : app.get_subcommands()) return run(sub->get_name(), flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::Config || e.code() == Errc::UnknownScenario ? kConfig : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
