// vinenav: generate vineyard worlds, run closed-loop navigation
// simulations, replay recorded scan logs through the controllers and
// evaluate run logs.
//
// Exit codes: 0 success, 1 navigation fault, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vinenav/config.hpp"
#include "vinenav/evaluation.hpp"
#include "vinenav/run_log.hpp"
#include "vinenav/runner.hpp"
#include "vinenav/simulator.hpp"

namespace {

vinenav::RunConfig load_config(const std::string& config_path,
                               std::optional<std::uint64_t> seed_override) {
  vinenav::RunConfig cfg = config_path.empty() ? vinenav::default_run_config()
                                               : vinenav::load_run_config(config_path);
  if (seed_override) vinenav::apply_seed_override(cfg, *seed_override);
  vinenav::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map-free vineyard row navigation simulator and evaluation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  bool scan_log = false;
  bool svg = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "JSON config file (defaults used if omitted)");
    cmd->add_option("-o,--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_value, "master seed override")
        ->each([&](const std::string&) { seed_given = true; });
  };

  CLI::App* generate = app.add_subcommand("generate", "generate a world file");
  add_common(generate);

  CLI::App* run = app.add_subcommand("run", "run a closed-loop simulation");
  add_common(run);
  run->add_flag("--scan-log", scan_log, "also write the filtered scan log (scans.jsonl)");
  run->add_flag("--svg", svg, "write a trajectory SVG");

  std::string replay_scans_path;
  CLI::App* replay = app.add_subcommand("replay", "replay a scan log through the controllers");
  add_common(replay);
  replay->add_option("scans", replay_scans_path, "scan log (scans.jsonl)")->required();

  std::string eval_run_dir, eval_world_path;
  CLI::App* eval = app.add_subcommand("eval", "compute metrics from a run log");
  eval->add_option("run_dir", eval_run_dir, "directory written by `run`")->required();
  eval->add_option("world", eval_world_path, "world.json (defaults to run_dir/world.json)");
  eval->add_option("-o,--out", out_dir, "output directory for metrics.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const auto cfg =
          load_config(config_path, seed_given ? std::optional(seed_value) : std::nullopt);
      const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
      std::filesystem::create_directories(dir);
      const vinenav::World world = vinenav::generate_world(cfg.world);
      vinenav::write_world(dir + "/world.json", world);
      std::printf("world written: %s/world.json (%d rows, %zu obstacles)\n", dir.c_str(),
                  world.config.n_rows, world.obstacles.size());
      return 0;
    }

    if (run->parsed()) {
      const auto cfg =
          load_config(config_path, seed_given ? std::optional(seed_value) : std::nullopt);
      const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
      std::filesystem::create_directories(dir);
      const bool want_scans = scan_log || cfg.log_scans;
      const auto outcome = vinenav::run_simulation(
          cfg, want_scans ? std::optional(dir + "/scans.jsonl") : std::nullopt);
      vinenav::write_run_outputs(dir, cfg, outcome, svg);

      const auto report = vinenav::compute_metrics(outcome.log, outcome.world);
      std::printf("%s", vinenav::format_metrics_table(report).c_str());
      std::printf("sim time %.1f s, final phase %s\n", outcome.sim_time,
                  vinenav::phase_name(outcome.final_phase));
      return outcome.completed ? 0 : 1;
    }

    if (replay->parsed()) {
      const auto cfg =
          load_config(config_path, seed_given ? std::optional(seed_value) : std::nullopt);
      const auto scans = vinenav::read_scan_log(replay_scans_path);
      const auto commands = vinenav::replay_scan_log(scans, cfg);
      const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
      std::filesystem::create_directories(dir);
      vinenav::write_commands_csv(dir + "/commands.csv", commands);
      std::printf("replayed %zu scans -> %zu commands: %s/commands.csv\n", scans.size(),
                  commands.size(), dir.c_str());
      return 0;
    }

    if (eval->parsed()) {
      const std::string world_path =
          eval_world_path.empty() ? eval_run_dir + "/world.json" : eval_world_path;
      const vinenav::World world = vinenav::load_world(world_path);
      vinenav::RunLog log = vinenav::load_run_log(eval_run_dir);
      const auto report = vinenav::compute_metrics(log, world);
      const std::string dir = out_dir.empty() ? eval_run_dir : out_dir;
      std::filesystem::create_directories(dir);
      vinenav::write_metrics_json(dir + "/metrics.json", report);
      std::printf("%s", vinenav::format_metrics_table(report).c_str());
      return 0;
    }
  } catch (const vinenav::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
