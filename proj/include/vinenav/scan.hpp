#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vinenav/geometry.hpp"

// Range-scan containers and the filtering stage that turns a raw
// revolution of beams into the 2D point set the controllers consume.
namespace vinenav {

// One beam: bearing in the sensor polar convention (angle from the sensor
// +x axis, CCW), range in meters. range <= 0 marks a no-return beam.
struct Beam {
  double bearing = 0.0;
  double range = 0.0;
};

constexpr double kNoReturn = 0.0;

struct RawScan {
  double timestamp = 0.0;
  std::vector<Beam> beams;  // bearings strictly increasing over one revolution
};

struct Scan2D {
  double timestamp = 0.0;
  std::vector<Point2> points;  // sensor frame
};

struct FilterConfig {
  double min_range = 0.8;  // sensor cannot see closer than this
  double max_range = 20.0;
  int downsample_keep_every = 2;
  double outlier_radius = 0.3;
  int outlier_min_neighbors = 2;
};

// Polar -> Cartesian; no-return beams are dropped.
Scan2D to_points(const RawScan& raw);

// Keeps points with min_range <= |p| <= max_range, order preserved.
Scan2D radius_filter(const Scan2D& scan, double min_range, double max_range);

// Keeps indices 0, k, 2k, ...
Scan2D downsample(const Scan2D& scan, int keep_every);

// Keeps p iff at least min_neighbors other points lie within radius of p.
Scan2D outlier_filter(const Scan2D& scan, double radius, int min_neighbors);

// radius -> downsample -> outlier, in that order.
Scan2D apply_filters(const RawScan& raw, const FilterConfig& cfg);

// Scan log format: one scan per line, {"t":..., "points":[[x,y],...]},
// coordinates at 6 decimal places. Round trip is bit-exact at that
// precision.
void write_scan_line(std::ostream& out, const Scan2D& scan);
bool read_scan_line(const std::string& line, Scan2D& scan);
std::vector<Scan2D> read_scan_log(const std::string& path);

// Rounds coordinates to the log precision (1e-6 m) so the in-memory scan
// equals its serialized form.
Scan2D quantize(const Scan2D& scan);

}  // namespace vinenav
