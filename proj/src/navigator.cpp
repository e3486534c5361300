#include "vinenav/navigator.hpp"

#include <cmath>
#include <cstdio>

namespace vinenav {

namespace {
constexpr double kScanPeriodFallback = 0.1;
constexpr double kStallSpeedEps = 1e-3;
}  // namespace

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::InRow: return "InRow";
    case Phase::ExitStraight: return "ExitStraight";
    case Phase::TurnOut: return "TurnOut";
    case Phase::AlignHeadland: return "AlignHeadland";
    case Phase::EndRow: return "EndRow";
    case Phase::TurnIn: return "TurnIn";
    case Phase::Done: return "Done";
    case Phase::Fault: return "Fault";
  }
  return "?";
}

Navigator::Navigator(const NavigatorConfig& nav_cfg, const InRowConfig& in_row_cfg,
                     const TurnConfig& turn_cfg, const EndRowConfig& end_row_cfg)
    : cfg_(nav_cfg), in_row_cfg_(in_row_cfg), turn_cfg_(turn_cfg), end_row_cfg_(end_row_cfg) {
  direction_ = turn_cfg_.direction_first;
}

std::vector<NavEvent> Navigator::drain_events() {
  std::vector<NavEvent> out;
  out.swap(events_);
  return out;
}

void Navigator::transition(Phase next, const std::string& detail) {
  phase_ = next;
  phase_entry_pose_ = pose_;
  events_.push_back({t_, "phase", std::string(phase_name(next)) +
                                      (detail.empty() ? "" : " " + detail)});
  switch (next) {
    case Phase::InRow:
      in_row_state_ = InRowState{};
      break;
    case Phase::EndRow:
      end_row_state_ = EndRowState{};
      end_row_last_pose_ = pose_;
      break;
    case Phase::AlignHeadland:
    case Phase::TurnIn:
    case Phase::TurnOut:
      align_rotating_ = false;
      align_attempts_ = 0;
      turn_done_ = false;
      break;
    case Phase::Done:
    case Phase::Fault:
      last_command_ = Twist{};
      break;
    default:
      break;
  }
}

Twist Navigator::step(const std::optional<Scan2D>& scan, const Twist& odom, double dt) {
  t_ += dt;
  pose_ = integrate_pose(pose_, odom, dt);
  last_in_row_status_.reset();
  last_end_row_result_.reset();

  if (phase_ == Phase::Done || phase_ == Phase::Fault) return Twist{};

  Twist cmd;
  switch (phase_) {
    case Phase::InRow: cmd = step_in_row(scan); break;
    case Phase::ExitStraight: cmd = step_exit_straight(scan); break;
    case Phase::TurnOut: cmd = step_turn(scan, false); break;
    case Phase::AlignHeadland: cmd = step_align(scan); break;
    case Phase::EndRow: cmd = step_end_row(scan); break;
    case Phase::TurnIn: cmd = step_turn(scan, true); break;
    default: break;
  }

  if (scan) {
    // Degraded perception: an empty scan in any phase, or an end-row tick
    // that produced no clusters.
    bool usable = !scan->points.empty();
    if (last_end_row_result_ && last_end_row_result_->cluster_count == 0) usable = false;
    degraded_scan_ticks_ = usable ? 0 : degraded_scan_ticks_ + 1;
    last_scan_t_ = t_;
  }

  if (degraded_scan_ticks_ * kScanPeriodFallback >= cfg_.degraded_timeout_s &&
      phase_ != Phase::Done && phase_ != Phase::Fault) {
    fault_reason_ = FaultReason::DegradedPerception;
    transition(Phase::Fault, "degraded perception");
    return Twist{};
  }
  watch_stall(cmd, dt);
  if (phase_ == Phase::Fault || phase_ == Phase::Done) return Twist{};

  last_command_ = cmd;
  return cmd;
}

void Navigator::watch_stall(const Twist& cmd, double dt) {
  // A driving phase that commands no forward speed for the whole timeout
  // is blocked (the governor holds it at zero); residual in-place
  // steering does not count as progress.
  const bool driving = phase_ == Phase::InRow || phase_ == Phase::ExitStraight ||
                       phase_ == Phase::EndRow;
  if (driving && std::abs(cmd.v_y) < kStallSpeedEps) {
    stall_time_ += dt;
    if (stall_time_ >= cfg_.stall_timeout_s) {
      fault_reason_ = FaultReason::Stalled;
      transition(Phase::Fault, "stalled");
    }
  } else {
    stall_time_ = 0.0;
  }
}

Twist Navigator::step_in_row(const std::optional<Scan2D>& scan) {
  if (!scan) return last_command_;

  const double dt_scan = last_scan_t_ < 0.0 ? kScanPeriodFallback : t_ - last_scan_t_;
  auto [cmd, status] = in_row_step(*scan, dt_scan, in_row_state_, in_row_cfg_);
  last_in_row_status_ = status;

  if (status.row_ended) {
    if (corridor_index_ + 1 >= cfg_.corridors_to_traverse) {
      transition(Phase::Done, "all corridors traversed");
      return Twist{};
    }
    transition(Phase::ExitStraight);
  }
  return cmd;
}

Twist Navigator::step_exit_straight(const std::optional<Scan2D>& scan) {
  if (distance(pose_.position, phase_entry_pose_.position) >= in_row_cfg_.exit_distance) {
    transition(Phase::TurnOut);
    return Twist{};
  }
  if (!scan) return last_command_;
  Twist cmd;
  cmd.v_y = govern_speed(*scan, in_row_cfg_);
  cmd.omega_z = 0.0;
  return cmd;
}

std::optional<double> Navigator::measure_alignment(const Scan2D& scan, AlignMode mode) const {
  const auto clusters =
      euclidean_cluster(scan, end_row_cfg_.cluster_tolerance, end_row_cfg_.min_cluster_size);
  std::vector<EndPoint> endpoints;
  for (const Cluster& c : clusters)
    if (auto ep = pick_end_point(c, Point2{0.0, 0.0}, end_row_cfg_)) endpoints.push_back(*ep);
  const std::vector<EndPoint> row_ends = select_row_end_points(endpoints, end_row_cfg_);

  if (mode == AlignMode::Parallel) {
    // Nearest end point ahead of the robot's lateral axis and nearest
    // behind it.
    std::optional<Point2> front, back;
    for (const EndPoint& ep : row_ends) {
      const double y = ep.position.y;
      if (y > 0.0 && (!front || y < front->y)) front = ep.position;
      if (y <= 0.0 && (!back || y > back->y)) back = ep.position;
    }
    if (!front || !back) return std::nullopt;
    return align_to_end_row(*front, *back, turn_cfg_);
  }

  // Perpendicular: face the midpoint between the two poles flanking the
  // corridor mouth, taken as the nearest end point on each side of the
  // forward axis (the grouped representatives merge the pair when the
  // robot faces the line).
  std::optional<Point2> left_flank, right_flank;
  for (const EndPoint& ep : endpoints) {
    const double r = norm(ep.position);
    if (ep.position.x < 0.0) {
      if (!left_flank || r < norm(*left_flank)) left_flank = ep.position;
    } else {
      if (!right_flank || r < norm(*right_flank)) right_flank = ep.position;
    }
  }
  if (!left_flank || !right_flank) return std::nullopt;
  const double separation = distance(*left_flank, *right_flank);
  if (separation < 0.4 * end_row_cfg_.corridor_spacing ||
      separation > 1.6 * end_row_cfg_.corridor_spacing)
    return std::nullopt;  // not a plausible flanking pair
  const Point2 mouth = 0.5 * (*left_flank + *right_flank);
  if (norm(mouth) < 1e-6) return 0.0;
  return bearing(mouth);
}

std::optional<Twist> Navigator::run_alignment(const std::optional<Scan2D>& scan,
                                              AlignMode mode) {
  if (align_rotating_) {
    const double delta = std::abs(normalize_angle(pose_.heading - align_entry_heading_));
    if (delta >= align_target_) {
      align_rotating_ = false;
      ++align_attempts_;
      return Twist{};
    }
    Twist cmd;
    cmd.omega_z = align_sign_ * turn_cfg_.omega_turn;
    return cmd;
  }

  if (!scan) return Twist{};

  const std::optional<double> correction = measure_alignment(*scan, mode);
  if (!correction) {
    events_.push_back({t_, "align", "end points unavailable, proceeding unaligned"});
    return std::nullopt;
  }
  if (std::abs(*correction) <= turn_cfg_.alignment_tolerance || align_attempts_ >= 5) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "aligned within %.4f rad after %d rotations", *correction,
                  align_attempts_);
    events_.push_back({t_, "align", buf});
    return std::nullopt;
  }

  align_rotating_ = true;
  align_target_ = std::abs(*correction);
  align_sign_ = *correction >= 0.0 ? 1.0 : -1.0;
  align_entry_heading_ = pose_.heading;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "correction %.4f rad", *correction);
  events_.push_back({t_, "align", buf});
  Twist cmd;
  cmd.omega_z = align_sign_ * turn_cfg_.omega_turn;
  return cmd;
}

Twist Navigator::step_turn(const std::optional<Scan2D>& scan, bool inward) {
  if (!turn_done_) {
    const double delta = std::abs(normalize_angle(pose_.heading - phase_entry_pose_.heading));
    auto [cmd, done] = turn_step(delta, direction_, turn_cfg_);
    if (!done) return cmd;
    turn_done_ = true;
    events_.push_back({t_, "turn",
                       inward ? "inward rotation done" : "outward rotation done"});
    if (!inward) {
      transition(Phase::AlignHeadland);
      return Twist{};
    }
  }

  // Inward turns verify the entry heading against the row-end line before
  // handing over; the open-loop rotation alone under-rotates when the
  // treads skid.
  if (auto cmd = run_alignment(scan, AlignMode::Perpendicular)) return *cmd;

  ++corridor_index_;
  direction_ = opposite(direction_);
  transition(Phase::InRow);
  return Twist{};
}

Twist Navigator::step_align(const std::optional<Scan2D>& scan) {
  if (auto cmd = run_alignment(scan, AlignMode::Parallel)) return *cmd;
  transition(Phase::EndRow);
  return Twist{};
}

Twist Navigator::step_end_row(const std::optional<Scan2D>& scan) {
  if (!scan) return last_command_;

  const double traveled = distance(pose_.position, end_row_last_pose_.position);
  end_row_last_pose_ = pose_;
  EndRowStepResult result = end_row_step(*scan, traveled, end_row_state_, end_row_cfg_);
  last_end_row_result_ = result;

  if (result.arrived) {
    transition(Phase::TurnIn);
    return Twist{};
  }
  return result.command;
}

}  // namespace vinenav
