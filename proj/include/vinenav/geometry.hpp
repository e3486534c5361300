#pragma once

#include <cmath>

// Planar primitives shared by every module.
//
// Frame conventions used throughout:
//   world frame:  x east, y north, heading measured CCW from +x.
//   body frame:   the robot's forward axis is body +y (the skid-steer
//                 kinematics produce v_x == 0, so +y carries the linear
//                 speed). Positive bearing is CCW from body-forward,
//                 i.e. toward the robot's left (-x side).
namespace vinenav {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(const Point2& a, const Point2& b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, const Point2& p) { return {s * p.x, s * p.y}; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& p) { return std::hypot(p.x, p.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }

// Robot pose in the world frame. heading is kept in (-pi, pi].
struct Pose2 {
  Point2 position;
  double heading = 0.0;
};

// Forward-facing free sector. apex + axis_heading are expressed in the
// frame of the scan being tested; axis_heading uses the body bearing
// convention (0 = straight ahead). The two half-angles are independent:
// left bounds positive bearings, right bounds negative ones.
struct Cone2 {
  Point2 apex;
  double axis_heading = 0.0;
  double left_half_angle = 0.0;
  double right_half_angle = 0.0;
  double length = 1.0;
};

// Oriented rectangle. half_length extends along the rect's local +x
// (rotated by heading), half_width along local +y.
struct Rect2 {
  Point2 center;
  double heading = 0.0;
  double half_length = 1.0;
  double half_width = 1.0;
};

struct Segment2 {
  Point2 a;
  Point2 b;
};

// Wraps theta into (-pi, pi]. Idempotent, 2pi-periodic.
double normalize_angle(double theta);

// Rigid transforms between world and an arbitrary frame given as a Pose2.
Point2 transform_to_frame(const Point2& p_world, const Pose2& frame);
Point2 transform_from_frame(const Point2& p_local, const Pose2& frame);

// Bearing of v measured CCW from the +y axis (body-forward). (0,1) -> 0,
// (-1,0) -> +pi/2, (1,0) -> -pi/2.
inline double bearing(const Point2& v) { return std::atan2(-v.x, v.y); }

// Unit vector at the given body bearing.
inline Point2 unit_from_bearing(double b) { return {-std::sin(b), std::cos(b)}; }

// Direction of the robot's forward axis (+y body) in the world frame.
inline Point2 forward_axis(double heading) { return {-std::sin(heading), std::cos(heading)}; }

// Membership predicates. Boundaries are closed (<=) so point counting is
// deterministic.
bool point_in_cone(const Point2& p, const Cone2& cone);
bool point_in_rect(const Point2& p, const Rect2& rect);

}  // namespace vinenav
