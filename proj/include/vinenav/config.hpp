#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "vinenav/end_row.hpp"
#include "vinenav/in_row.hpp"
#include "vinenav/navigator.hpp"
#include "vinenav/odometry.hpp"
#include "vinenav/scan.hpp"
#include "vinenav/simulator.hpp"
#include "vinenav/turn.hpp"

namespace vinenav {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Whole-run configuration. Every field has a default; a config file may
// set any subset. Unknown fields are rejected.
struct RunConfig {
  std::uint64_t seed = 42;
  int corridors_to_traverse = 3;
  std::string output_dir = "out";
  bool log_scans = false;

  WorldConfig world;
  SensorConfig sensor;
  DynamicsConfig dynamics;
  KinematicParams kinematics;
  FilterConfig filter;
  InRowConfig in_row;
  TurnConfig turn;
  EndRowConfig end_row;
  NavigatorConfig navigator;  // corridors_to_traverse is copied in at load
};

RunConfig default_run_config();

// Loads a JSON config, applying file values over defaults. Throws
// ConfigError naming the offending field on unknown keys, type mismatches
// or invariant violations.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Validates cross-field invariants; throws ConfigError.
void validate(const RunConfig& cfg);

// Master-seed override: reseeds the sensor stream, the world generator
// and the RANSAC generator deterministically from one value.
void apply_seed_override(RunConfig& cfg, std::uint64_t seed);

// Full effective-config echo (for run provenance).
std::string config_json(const RunConfig& cfg);

}  // namespace vinenav
