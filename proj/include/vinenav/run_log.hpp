#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vinenav/end_row.hpp"
#include "vinenav/geometry.hpp"
#include "vinenav/navigator.hpp"
#include "vinenav/simulator.hpp"

// Run artifacts: in-memory log of one run plus readers/writers for the
// on-disk layout (trajectory.csv, in_row.csv, end_row.csv, events.csv,
// commands.csv).
namespace vinenav {

struct TrajectorySample {
  double t = 0.0;
  Pose2 truth;
  Pose2 odom;
  Phase phase = Phase::InRow;
  int corridor = 0;
};

struct InRowRecord {
  double t = 0.0;
  Pose2 pose;  // dead-reckoned
  double left = 0.0;
  double right = 0.0;
  double left_half = 0.0;
  double right_half = 0.0;
  double offset = 0.0;
  double v = 0.0;
  double omega = 0.0;
  bool row_ended = false;
  int corridor = 0;
};

struct LoggedEndPoint {
  Point2 world;
  EndPointPolicy policy = EndPointPolicy::Nearest;
};

struct EndRowRecord {
  double t = 0.0;
  int cluster_count = 0;
  int passed = 0;
  std::optional<Segment2> segment;  // world frame
  std::vector<LoggedEndPoint> endpoints;
};

struct EventRecord {
  double t = 0.0;
  std::string label;
  std::string detail;
};

struct CommandRecord {
  long tick = 0;
  double t = 0.0;
  double v = 0.0;
  double omega = 0.0;
};

struct RunLog {
  std::vector<TrajectorySample> trajectory;
  std::vector<InRowRecord> in_row;
  std::vector<EndRowRecord> end_row;
  std::vector<EventRecord> events;
  std::vector<CommandRecord> commands;
  int collisions = 0;
  bool completed = false;
  std::string final_phase;
  std::string fault_reason;
};

Phase phase_from_name(const std::string& name);

void write_run_log(const std::string& dir, const RunLog& log);
RunLog load_run_log(const std::string& dir);

void write_commands_csv(const std::string& path, const std::vector<CommandRecord>& commands);

// Simple SVG of the ground-truth trajectory over the world rows.
void write_trajectory_svg(const std::string& path, const RunLog& log, const World& world);

}  // namespace vinenav
