#pragma once

#include <optional>
#include <string>

#include "vinenav/config.hpp"
#include "vinenav/evaluation.hpp"
#include "vinenav/run_log.hpp"
#include "vinenav/simulator.hpp"

// Closed-loop simulation driver: dynamics and odometry at the odometry
// rate, the sensor every Nth tick, the navigator in lockstep.
namespace vinenav {

struct RunOutcome {
  bool completed = false;  // reached Done
  Phase final_phase = Phase::Fault;
  FaultReason fault_reason = FaultReason::None;
  double sim_time = 0.0;
  World world;
  RunLog log;
};

RunOutcome run_simulation(const RunConfig& cfg,
                          std::optional<std::string> scan_log_path = std::nullopt);

// Writes world.json, run_meta.json, the run log CSVs, metrics.json and
// (optionally) trajectory.svg under dir.
void write_run_outputs(const std::string& dir, const RunConfig& cfg, const RunOutcome& run,
                       bool write_svg);

// Feeds a recorded scan log through the navigator, reconstructing the
// inter-scan odometry from its own commands. Deterministic.
std::vector<CommandRecord> replay_scan_log(const std::vector<Scan2D>& scans,
                                           const RunConfig& cfg);

}  // namespace vinenav
