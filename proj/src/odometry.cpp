#include "vinenav/odometry.hpp"

#include <cmath>
#include <stdexcept>

namespace vinenav {

static void check_params(const KinematicParams& params) {
  if (params.x_icr == 0.0) throw std::invalid_argument("kinematics: x_icr must be nonzero");
  if (!(params.alpha > 0.0)) throw std::invalid_argument("kinematics: alpha must be > 0");
}

Twist tread_to_twist(const TreadSpeeds& treads, const KinematicParams& params) {
  check_params(params);
  Twist t;
  t.v_x = 0.0;
  t.v_y = params.alpha * (treads.v_left + treads.v_right) / 2.0;
  t.omega_z = params.alpha * (treads.v_right - treads.v_left) / (2.0 * params.x_icr);
  return t;
}

TreadSpeeds twist_to_treads(const Twist& twist, const KinematicParams& params) {
  check_params(params);
  const double common = twist.v_y / params.alpha;
  const double diff = twist.omega_z * params.x_icr / params.alpha;
  return {common - diff, common + diff};
}

Pose2 integrate_pose(const Pose2& pose, const Twist& twist, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_pose: dt must be > 0");
  const double c0 = std::cos(pose.heading);
  const double s0 = std::sin(pose.heading);
  Pose2 next;
  if (std::abs(twist.omega_z) < 1e-9) {
    // Straight-line limit: body velocity rotated into the world frame.
    const double wx = c0 * twist.v_x - s0 * twist.v_y;
    const double wy = s0 * twist.v_x + c0 * twist.v_y;
    next.position = {pose.position.x + wx * dt, pose.position.y + wy * dt};
    next.heading = normalize_angle(pose.heading + twist.omega_z * dt);
    return next;
  }
  // Constant body twist follows a circular arc:
  //   dp = (1/omega) * J^T (R(h1) - R(h0)) u, with J the 90-degree rotation.
  const double h1 = pose.heading + twist.omega_z * dt;
  const double c1 = std::cos(h1);
  const double s1 = std::sin(h1);
  const double inv_w = 1.0 / twist.omega_z;
  const double dx = inv_w * ((s1 - s0) * twist.v_x + (c1 - c0) * twist.v_y);
  const double dy = inv_w * (-(c1 - c0) * twist.v_x + (s1 - s0) * twist.v_y);
  next.position = {pose.position.x + dx, pose.position.y + dy};
  next.heading = normalize_angle(h1);
  return next;
}

}  // namespace vinenav
