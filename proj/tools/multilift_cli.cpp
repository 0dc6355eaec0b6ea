// Command-line front end: single episodes, Monte Carlo campaigns, scenario
// presets and the built-in validation sweep.
//
// Exit codes: 0 success, 2 configuration error, 3 filter divergence.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "multilift/harness.hpp"
#include "multilift/validate.hpp"

namespace {

using namespace multilift;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

SimConfig resolve_config(const std::string& config_path,
                         const std::string& scenario) {
  if (!config_path.empty()) return load_config_file(config_path);
  if (!scenario.empty()) return make_scenario(scenario);
  return make_scenario("pirouette");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed multi-rotorcraft slung-load state estimation simulator"};
  app.require_subcommand(1);

  std::string config_path, scenario_name, out_dir = "out";
  int runs = 50, parallel = 1, seed = -1;
  std::uint64_t master_seed = 0;
  bool have_master_seed = false, print_config = false;

  auto* run_cmd = app.add_subcommand("run", "Run one episode and export CSVs");
  run_cmd->add_option("--config", config_path, "JSON config file");
  run_cmd->add_option("--scenario", scenario_name, "Scenario preset name");
  run_cmd->add_option("--seed", seed, "Run index within the seed stream");
  run_cmd->add_option("--out", out_dir, "Output directory");

  auto* mc_cmd = app.add_subcommand("mc", "Run a Monte Carlo campaign");
  mc_cmd->add_option("--config", config_path, "JSON config file");
  mc_cmd->add_option("--scenario", scenario_name, "Scenario preset name");
  mc_cmd->add_option("--runs", runs, "Number of runs")->capture_default_str();
  mc_cmd->add_option("--parallel", parallel, "Worker thread count")
      ->capture_default_str();
  mc_cmd->add_option("--master-seed", master_seed, "Master seed override");
  mc_cmd->add_option("--out", out_dir, "Output directory");

  auto* scen_cmd = app.add_subcommand(
      "scenario", "Run a named scenario preset (pirouette, pirouette-commloss, "
                  "lissajous, lissajous-commloss)");
  scen_cmd->add_option("name", scenario_name, "Preset name")->required();
  scen_cmd->add_option("--runs", runs, "Number of runs")->capture_default_str();
  scen_cmd->add_option("--parallel", parallel, "Worker thread count")
      ->capture_default_str();
  scen_cmd->add_option("--out", out_dir, "Output directory");
  scen_cmd->add_flag("--print-config", print_config,
                     "Print the preset's JSON config and exit");

  auto* validate_cmd =
      app.add_subcommand("validate", "Run the oracle/property suite");
  (void)validate_cmd;

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) {
      return run_validation(std::cout) ? kExitOk : 1;
    }

    SimConfig cfg = resolve_config(config_path, scenario_name);

    if (app.got_subcommand("run")) {
      if (seed >= 0) cfg.runs = 1;
      const int run_index = seed >= 0 ? seed : 0;
      const EpisodeLog log = run_episode(cfg, run_index);
      if (log.diverged) {
        std::cerr << "filter diverged at t=" << log.diverged_at << " s\n";
        return kExitDivergence;
      }
      McResult result;
      result.runs.push_back(reduce_episode(log));
      result.summary = aggregate_runs(result.runs);
      SimConfig manifest_cfg = cfg;
      manifest_cfg.runs = 1;
      export_results(result, manifest_cfg, out_dir);
      std::cout << "episode complete: " << log.ticks.size() << " ticks -> "
                << out_dir << "\n";
      return kExitOk;
    }

    // mc / scenario
    if (mc_cmd->count("--runs") || scen_cmd->count("--runs")) cfg.runs = runs;
    if (mc_cmd->count("--master-seed")) cfg.master_seed = master_seed;
    if (print_config) {
      std::cout << config_to_json(cfg) << "\n";
      return kExitOk;
    }
    const McResult result = run_monte_carlo(cfg, parallel);
    export_results(result, cfg, out_dir);
    std::cout << "monte carlo complete: " << result.summary.total_runs
              << " runs (" << result.summary.diverged_runs << " diverged) -> "
              << out_dir << "\n";
    if (result.summary.diverged_runs == result.summary.total_runs) {
      return kExitDivergence;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
