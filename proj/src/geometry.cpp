#include "vinenav/geometry.hpp"

namespace vinenav {

double normalize_angle(double theta) {
  double a = std::remainder(theta, 2.0 * M_PI);  // lands in [-pi, pi]
  if (a <= -M_PI) a = M_PI;
  return a;
}

Point2 transform_to_frame(const Point2& p_world, const Pose2& frame) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  const Point2 d = p_world - frame.position;
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Point2 transform_from_frame(const Point2& p_local, const Pose2& frame) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {c * p_local.x - s * p_local.y + frame.position.x,
          s * p_local.x + c * p_local.y + frame.position.y};
}

bool point_in_cone(const Point2& p, const Cone2& cone) {
  const Point2 d = p - cone.apex;
  if (norm(d) > cone.length) return false;
  const double rel = normalize_angle(bearing(d) - cone.axis_heading);
  return rel >= -cone.right_half_angle && rel <= cone.left_half_angle;
}

bool point_in_rect(const Point2& p, const Rect2& rect) {
  const Point2 local = transform_to_frame(p, Pose2{rect.center, rect.heading});
  return std::abs(local.x) <= rect.half_length && std::abs(local.y) <= rect.half_width;
}

}  // namespace vinenav
