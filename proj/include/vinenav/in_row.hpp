#pragma once

#include <utility>

#include "vinenav/geometry.hpp"
#include "vinenav/odometry.hpp"
#include "vinenav/scan.hpp"

// In-row (corridor following) controller. All geometry is in the body
// frame: forward = +y, positive bearing/steer = toward the left (-x).
namespace vinenav {

struct PidGains {
  double kp = 1.2;
  double ki = 0.0;
  double kd = 0.1;
};

struct InRowConfig {
  // Obstacle-free cone search.
  double cone_length = 3.0;
  double cone_angle_step = M_PI / 180.0;  // 1 degree
  double cone_max_half_angle = M_PI / 3.0;
  int cone_point_threshold = 4;

  // Side rectangles measuring the distance to each row.
  double side_rect_length = 2.0;  // along body-forward, centered on the robot
  double side_rect_growth_step = 0.05;
  double side_rect_max_width = 2.0;
  int side_rect_point_threshold = 5;

  // Steering.
  double center_gain = 0.5;  // rad per meter of off-center displacement
  double lookahead = 1.0;    // steering point 1 m ahead
  PidGains pid;
  double pid_integral_limit = 0.5;

  // Speed governor rectangle, front-center of the robot.
  double v_max = 2.0;
  double governor_length = 2.0;
  double governor_width = 0.6;
  double governor_stop_distance = 0.5;

  // Row-end detection rectangle spanning the corridor ahead.
  double end_rect_length = 3.0;
  double end_rect_width = 3.0;
  int end_point_threshold = 5;
  double exit_distance = 1.0;  // straight travel after the end fires
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
};

struct InRowState {
  PidState pid;
  bool row_end_latched = false;  // latched until the navigator leaves the row
};

struct InRowStatus {
  Cone2 cone;
  double left_distance = 0.0;
  double right_distance = 0.0;
  double steering_offset = 0.0;
  Point2 steering_target;
  Twist commanded;
  bool row_ended = false;
};

// Grows the free cone from zero aperture, one angle step at a time. Each
// side is independent: a side freezes when the next enlargement would
// bring that side's point count up to cone_point_threshold, or at
// cone_max_half_angle. A side's count covers bearings in [0, half_angle]
// (left) or [-half_angle, 0] (right) within cone_length.
Cone2 find_cone(const Scan2D& scan, const InRowConfig& cfg);

// Bearing of the cone bisector relative to body-forward.
double cone_offset(const Cone2& cone);

// Lateral distance to each row, from rectangles grown sideways off the
// robot until side_rect_point_threshold points fall inside (saturating at
// side_rect_max_width).
std::pair<double, double> side_distances(const Scan2D& scan, const InRowConfig& cfg);

// Combined steering bearing: cone bisector plus a term proportional to
// the robot's displacement from the corridor center, steering back toward
// the center. Clamped to +/- cone_max_half_angle.
double steering_offset(double cone_offset, double left, double right, const InRowConfig& cfg);

// Point at `lookahead` meters along the steering bearing.
Point2 steering_target(double offset, double lookahead);

// Positional PID with rectangle-rule integration and clamped integral.
double pid_step(double error, PidState& state, double dt, const PidGains& gains,
                double integral_limit);

// Linear speed from the nearest obstacle inside the governor rectangle:
// v_max when empty, 0 at governor_stop_distance, linear ramp between the
// stop distance and the rectangle's forward extent.
double govern_speed(const Scan2D& scan, const InRowConfig& cfg);

// True iff fewer than end_point_threshold points fall in the end
// rectangle ahead of the robot.
bool detect_row_end(const Scan2D& scan, const InRowConfig& cfg);

// One control update at scan rate. Once the row end is detected the latch
// holds and the command goes straight; the navigator owns the subsequent
// fixed-distance exit leg.
std::pair<Twist, InRowStatus> in_row_step(const Scan2D& scan, double dt, InRowState& state,
                                          const InRowConfig& cfg);

}  // namespace vinenav
