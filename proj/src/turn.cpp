#include "vinenav/turn.hpp"

#include <cmath>
#include <stdexcept>

namespace vinenav {

std::pair<Twist, bool> turn_step(double accumulated_heading_delta, TurnDirection direction,
                                 const TurnConfig& cfg) {
  if (std::abs(accumulated_heading_delta) >= cfg.turn_angle) return {Twist{}, true};
  Twist cmd;
  cmd.omega_z = turn_sign(direction) * cfg.omega_turn;
  return {cmd, false};
}

double align_to_end_row(const Point2& front_point, const Point2& back_point,
                        const TurnConfig&) {
  const Point2 d = front_point - back_point;
  if (d.x == 0.0 && d.y == 0.0)
    throw std::invalid_argument("align_to_end_row: end points must be distinct");
  return bearing(d);
}

}  // namespace vinenav
