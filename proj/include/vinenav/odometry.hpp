#pragma once

#include "vinenav/geometry.hpp"

// Skid-steering forward kinematics and dead-reckoning integration.
//
// The kinematic matrix maps tread speeds (V_l, V_r) to a body twist with
// a zero first row, so the linear speed lands on body +y and v_x is
// identically zero. alpha is an empirical correction factor, x_icr the
// x-offset of the instantaneous center of rotation.
namespace vinenav {

struct TreadSpeeds {
  double v_left = 0.0;
  double v_right = 0.0;
};

struct Twist {
  double v_x = 0.0;
  double v_y = 0.0;
  double omega_z = 0.0;
};

struct KinematicParams {
  double alpha = 1.0;
  double x_icr = 0.5;  // meters, must be nonzero
};

// v_x = 0, v_y = alpha*(V_l+V_r)/2, omega = alpha*(V_r-V_l)/(2*x_icr).
Twist tread_to_twist(const TreadSpeeds& treads, const KinematicParams& params);

// Pseudo-inverse of the above on the (v_y, omega) subsystem; v_x is
// ignored (non-holonomic).
TreadSpeeds twist_to_treads(const Twist& twist, const KinematicParams& params);

// Exact unicycle arc integration over dt. Falls back to the straight-line
// limit when |omega| < 1e-9 rad/s.
Pose2 integrate_pose(const Pose2& pose, const Twist& twist, double dt);

}  // namespace vinenav
