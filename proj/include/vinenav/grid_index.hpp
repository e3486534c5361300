#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "vinenav/geometry.hpp"

namespace vinenav {

// Uniform-grid bucket index over a fixed point set. With cell size equal
// to the query radius, all neighbors within that radius live in the 3x3
// cell block around the query point.
class GridIndex {
 public:
  GridIndex(const std::vector<Point2>& points, double cell) : points_(points), cell_(cell) {
    buckets_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) buckets_[key(points[i])].push_back(i);
  }

  // Visits indices of points in the 3x3 cell block around p. The visitor
  // returns true to stop early.
  template <typename Visitor>
  void for_each_candidate(const Point2& p, Visitor&& visit) const {
    const std::int64_t cx = coord(p.x);
    const std::int64_t cy = coord(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = buckets_.find(pack(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (std::size_t idx : it->second)
          if (visit(idx)) return;
      }
    }
  }

 private:
  std::int64_t coord(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }
  static std::uint64_t pack(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
  }
  std::uint64_t key(const Point2& p) const { return pack(coord(p.x), coord(p.y)); }

  const std::vector<Point2>& points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace vinenav
