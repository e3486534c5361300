#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vinenav/end_row.hpp"
#include "vinenav/in_row.hpp"
#include "vinenav/odometry.hpp"
#include "vinenav/scan.hpp"
#include "vinenav/turn.hpp"

// Phase machine tying the controllers together on the 50 Hz odometry
// clock with scans arriving every fifth tick. The navigator dead-reckons
// its own pose from the odometry twists; turns and exit legs are
// odometry-monitored, everything else is scan-reactive.
namespace vinenav {

enum class Phase { InRow, ExitStraight, TurnOut, AlignHeadland, EndRow, TurnIn, Done, Fault };

enum class FaultReason { None, DegradedPerception, Stalled };

const char* phase_name(Phase p);

struct NavigatorConfig {
  int corridors_to_traverse = 3;
  double degraded_timeout_s = 1.5;  // scan ticks without usable perception
  double stall_timeout_s = 10.0;    // zero commanded motion in a driving phase
};

struct NavEvent {
  double t = 0.0;
  std::string label;
  std::string detail;
};

class Navigator {
 public:
  Navigator(const NavigatorConfig& nav_cfg, const InRowConfig& in_row_cfg,
            const TurnConfig& turn_cfg, const EndRowConfig& end_row_cfg);

  // One tick. scan is present on scan ticks only; odom is the measured
  // body twist over the last dt. Commands are recomputed on scan ticks
  // and zero-order held in between.
  Twist step(const std::optional<Scan2D>& scan, const Twist& odom, double dt);

  Phase phase() const { return phase_; }
  FaultReason fault_reason() const { return fault_reason_; }
  const Pose2& pose() const { return pose_; }  // dead-reckoned
  double time() const { return t_; }
  int corridor_index() const { return corridor_index_; }
  TurnDirection direction() const { return direction_; }

  // Log hooks: valid for the tick just stepped.
  const std::optional<InRowStatus>& last_in_row_status() const { return last_in_row_status_; }
  const std::optional<EndRowStepResult>& last_end_row_result() const {
    return last_end_row_result_;
  }
  std::vector<NavEvent> drain_events();

 private:
  void transition(Phase next, const std::string& detail = "");
  Twist step_in_row(const std::optional<Scan2D>& scan);
  Twist step_exit_straight(const std::optional<Scan2D>& scan);
  Twist step_turn(const std::optional<Scan2D>& scan, bool inward);
  Twist step_align(const std::optional<Scan2D>& scan);
  Twist step_end_row(const std::optional<Scan2D>& scan);
  void watch_stall(const Twist& cmd, double dt);

  // Heading correction from the detected row-end line: parallel for
  // headland travel, facing the perpendicular foot for corridor entry.
  enum class AlignMode { Parallel, Perpendicular };
  std::optional<double> measure_alignment(const Scan2D& scan, AlignMode mode) const;
  // Shared correction-rotation loop; returns the command while aligning,
  // nullopt once converged (or measurement is unavailable).
  std::optional<Twist> run_alignment(const std::optional<Scan2D>& scan, AlignMode mode);

  NavigatorConfig cfg_;
  InRowConfig in_row_cfg_;
  TurnConfig turn_cfg_;
  EndRowConfig end_row_cfg_;

  Phase phase_ = Phase::InRow;
  FaultReason fault_reason_ = FaultReason::None;
  Pose2 pose_;
  Pose2 phase_entry_pose_;
  double t_ = 0.0;
  double last_scan_t_ = -1.0;
  int corridor_index_ = 0;
  TurnDirection direction_ = TurnDirection::Left;

  InRowState in_row_state_;
  EndRowState end_row_state_;
  Pose2 end_row_last_pose_;

  // Alignment-rotation bookkeeping (headland align and turn-in verify).
  bool align_rotating_ = false;
  double align_target_ = 0.0;
  double align_sign_ = 1.0;
  double align_entry_heading_ = 0.0;
  int align_attempts_ = 0;
  bool turn_done_ = false;  // odometry-monitored part of TurnIn finished

  Twist last_command_;
  int degraded_scan_ticks_ = 0;
  double stall_time_ = 0.0;

  std::optional<InRowStatus> last_in_row_status_;
  std::optional<EndRowStepResult> last_end_row_result_;
  std::vector<NavEvent> events_;
};

}  // namespace vinenav
