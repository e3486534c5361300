#pragma once

#include <optional>

#include "vinenav/geometry.hpp"
#include "vinenav/odometry.hpp"

// Open-loop in-place rotation at a row exit, plus the skid-compensating
// re-alignment against two detected row-end points.
namespace vinenav {

enum class TurnDirection { Left, Right };

struct TurnConfig {
  double turn_angle = M_PI / 2.0;
  TurnDirection direction_first = TurnDirection::Left;
  double omega_turn = 0.5;                   // rad/s
  double alignment_tolerance = M_PI / 90.0;  // 2 degrees
};

// Commands (v=0, omega=+/-omega_turn) until the accumulated heading delta
// reaches turn_angle.
std::pair<Twist, bool> turn_step(double accumulated_heading_delta, TurnDirection direction,
                                 const TurnConfig& cfg);

// Signed heading correction that aligns body-forward with the back->front
// direction of the segment through the two row-end points (body frame).
// Positive = CCW, matching the omega sign convention.
double align_to_end_row(const Point2& front_point, const Point2& back_point,
                        const TurnConfig& cfg);

inline TurnDirection opposite(TurnDirection d) {
  return d == TurnDirection::Left ? TurnDirection::Right : TurnDirection::Left;
}

inline double turn_sign(TurnDirection d) { return d == TurnDirection::Left ? 1.0 : -1.0; }

}  // namespace vinenav
