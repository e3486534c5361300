#include "vinenav/in_row.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vinenav {

namespace {

// Per-point polar view of the scan, precomputed once per update.
struct PolarPoint {
  double range;
  double bearing;  // from body-forward, CCW positive
};

std::vector<PolarPoint> to_polar(const Scan2D& scan) {
  std::vector<PolarPoint> out;
  out.reserve(scan.points.size());
  for (const Point2& p : scan.points) out.push_back({norm(p), bearing(p)});
  return out;
}

int count_side(const std::vector<PolarPoint>& polar, double half_angle, double length,
               bool left) {
  int n = 0;
  for (const PolarPoint& p : polar) {
    if (p.range > length) continue;
    const double b = left ? p.bearing : -p.bearing;
    if (b >= 0.0 && b <= half_angle) ++n;
  }
  return n;
}

double grow_side(const std::vector<PolarPoint>& polar, const InRowConfig& cfg, bool left) {
  double half = 0.0;
  while (half < cfg.cone_max_half_angle) {
    const double next = std::min(half + cfg.cone_angle_step, cfg.cone_max_half_angle);
    if (count_side(polar, next, cfg.cone_length, left) >= cfg.cone_point_threshold) break;
    half = next;
  }
  return half;
}

}  // namespace

Cone2 find_cone(const Scan2D& scan, const InRowConfig& cfg) {
  const auto polar = to_polar(scan);
  Cone2 cone;
  cone.apex = {0.0, 0.0};
  cone.axis_heading = 0.0;
  cone.length = cfg.cone_length;
  cone.left_half_angle = grow_side(polar, cfg, true);
  cone.right_half_angle = grow_side(polar, cfg, false);
  return cone;
}

double cone_offset(const Cone2& cone) {
  return (cone.left_half_angle - cone.right_half_angle) / 2.0;
}

std::pair<double, double> side_distances(const Scan2D& scan, const InRowConfig& cfg) {
  const double half_len = cfg.side_rect_length / 2.0;
  // Width at which each side rectangle first contains enough points.
  auto grow = [&](bool left) {
    double width = 0.0;
    while (width < cfg.side_rect_max_width) {
      width = std::min(width + cfg.side_rect_growth_step, cfg.side_rect_max_width);
      int n = 0;
      for (const Point2& p : scan.points) {
        if (std::abs(p.y) > half_len) continue;
        const double lateral = left ? -p.x : p.x;
        if (lateral >= 0.0 && lateral <= width &&
            ++n >= cfg.side_rect_point_threshold) break;
      }
      if (n >= cfg.side_rect_point_threshold) return width;
    }
    return cfg.side_rect_max_width;
  };
  return {grow(true), grow(false)};
}

double steering_offset(double cone_off, double left, double right, const InRowConfig& cfg) {
  // (left - right)/2 is the robot's displacement from the corridor center,
  // positive when closer to the right row; steering left (positive) then
  // brings it back toward the center.
  const double centering = cfg.center_gain * (left - right) / 2.0;
  return std::clamp(cone_off + centering, -cfg.cone_max_half_angle, cfg.cone_max_half_angle);
}

Point2 steering_target(double offset, double lookahead) {
  return lookahead * unit_from_bearing(offset);
}

double pid_step(double error, PidState& state, double dt, const PidGains& gains,
                double integral_limit) {
  state.integral = std::clamp(state.integral + error * dt, -integral_limit, integral_limit);
  const double derivative = state.has_prev ? (error - state.prev_error) / dt : 0.0;
  state.prev_error = error;
  state.has_prev = true;
  return gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
}

double govern_speed(const Scan2D& scan, const InRowConfig& cfg) {
  const double half_w = cfg.governor_width / 2.0;
  double nearest = -1.0;
  for (const Point2& p : scan.points) {
    if (p.y < 0.0 || p.y > cfg.governor_length || std::abs(p.x) > half_w) continue;
    const double d = norm(p);
    if (nearest < 0.0 || d < nearest) nearest = d;
  }
  if (nearest < 0.0) return cfg.v_max;
  if (nearest <= cfg.governor_stop_distance) return 0.0;
  const double ramp = (nearest - cfg.governor_stop_distance) /
                      (cfg.governor_length - cfg.governor_stop_distance);
  return cfg.v_max * std::min(ramp, 1.0);
}

bool detect_row_end(const Scan2D& scan, const InRowConfig& cfg) {
  const double half_w = cfg.end_rect_width / 2.0;
  int n = 0;
  for (const Point2& p : scan.points) {
    if (p.y < 0.0 || p.y > cfg.end_rect_length || std::abs(p.x) > half_w) continue;
    if (++n >= cfg.end_point_threshold) return false;
  }
  return n < cfg.end_point_threshold;
}

std::pair<Twist, InRowStatus> in_row_step(const Scan2D& scan, double dt, InRowState& state,
                                          const InRowConfig& cfg) {
  InRowStatus status;
  status.cone = find_cone(scan, cfg);
  const double cone_off = cone_offset(status.cone);
  const auto [left, right] = side_distances(scan, cfg);
  status.left_distance = left;
  status.right_distance = right;
  status.steering_offset = steering_offset(cone_off, left, right, cfg);
  status.steering_target = steering_target(status.steering_offset, cfg.lookahead);

  if (!state.row_end_latched && detect_row_end(scan, cfg)) state.row_end_latched = true;
  status.row_ended = state.row_end_latched;

  Twist cmd;
  cmd.v_y = govern_speed(scan, cfg);
  if (state.row_end_latched) {
    // End of row: keep going straight; the navigator measures the exit leg.
    cmd.omega_z = 0.0;
  } else {
    cmd.omega_z = pid_step(status.steering_offset, state.pid, dt, cfg.pid,
                           cfg.pid_integral_limit);
  }
  status.commanded = cmd;
  return {cmd, status};
}

}  // namespace vinenav
