#include "vinenav/scan.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "vinenav/grid_index.hpp"

namespace vinenav {

Scan2D to_points(const RawScan& raw) {
  Scan2D out;
  out.timestamp = raw.timestamp;
  out.points.reserve(raw.beams.size());
  for (const Beam& b : raw.beams) {
    if (!(b.range > 0.0) || !std::isfinite(b.range)) continue;
    out.points.push_back({b.range * std::cos(b.bearing), b.range * std::sin(b.bearing)});
  }
  return out;
}

Scan2D radius_filter(const Scan2D& scan, double min_range, double max_range) {
  if (!(min_range >= 0.0) || !(min_range < max_range))
    throw std::invalid_argument("radius_filter: need 0 <= min_range < max_range");
  Scan2D out;
  out.timestamp = scan.timestamp;
  out.points.reserve(scan.points.size());
  for (const Point2& p : scan.points) {
    const double r = norm(p);
    if (r >= min_range && r <= max_range) out.points.push_back(p);
  }
  return out;
}

Scan2D downsample(const Scan2D& scan, int keep_every) {
  if (keep_every < 1) throw std::invalid_argument("downsample: keep_every must be >= 1");
  Scan2D out;
  out.timestamp = scan.timestamp;
  out.points.reserve((scan.points.size() + keep_every - 1) / keep_every);
  for (std::size_t i = 0; i < scan.points.size(); i += static_cast<std::size_t>(keep_every))
    out.points.push_back(scan.points[i]);
  return out;
}

Scan2D outlier_filter(const Scan2D& scan, double radius, int min_neighbors) {
  if (!(radius > 0.0)) throw std::invalid_argument("outlier_filter: radius must be > 0");
  Scan2D out;
  out.timestamp = scan.timestamp;
  if (min_neighbors <= 0) {
    out.points = scan.points;
    return out;
  }
  GridIndex grid(scan.points, radius);
  const double r2 = radius * radius;
  out.points.reserve(scan.points.size());
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    int neighbors = 0;
    grid.for_each_candidate(scan.points[i], [&](std::size_t j) {
      if (j == i) return false;
      const Point2 d = scan.points[j] - scan.points[i];
      if (d.x * d.x + d.y * d.y <= r2 && ++neighbors >= min_neighbors) return true;
      return false;
    });
    if (neighbors >= min_neighbors) out.points.push_back(scan.points[i]);
  }
  return out;
}

Scan2D apply_filters(const RawScan& raw, const FilterConfig& cfg) {
  Scan2D s = to_points(raw);
  s = radius_filter(s, cfg.min_range, cfg.max_range);
  s = downsample(s, cfg.downsample_keep_every);
  s = outlier_filter(s, cfg.outlier_radius, cfg.outlier_min_neighbors);
  return s;
}

Scan2D quantize(const Scan2D& scan) {
  Scan2D out;
  out.timestamp = scan.timestamp;
  out.points.reserve(scan.points.size());
  for (const Point2& p : scan.points)
    out.points.push_back({std::round(p.x * 1e6) / 1e6, std::round(p.y * 1e6) / 1e6});
  return out;
}

void write_scan_line(std::ostream& out, const Scan2D& scan) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "{\"t\":%.3f,\"points\":[", scan.timestamp);
  out << buf;
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s[%.6f,%.6f]", i ? "," : "", scan.points[i].x,
                  scan.points[i].y);
    out << buf;
  }
  out << "]}\n";
}

bool read_scan_line(const std::string& line, Scan2D& scan) {
  scan.points.clear();
  const char* s = line.c_str();
  double t;
  int consumed = 0;
  if (std::sscanf(s, " {\"t\":%lf,\"points\":[%n", &t, &consumed) != 1 || consumed == 0)
    return false;
  scan.timestamp = t;
  s += consumed;
  while (true) {
    double x, y;
    consumed = 0;
    if (std::sscanf(s, " [%lf,%lf]%n", &x, &y, &consumed) == 2 && consumed > 0) {
      scan.points.push_back({x, y});
      s += consumed;
      if (*s == ',') ++s;
    } else {
      break;
    }
  }
  return true;
}

std::vector<Scan2D> read_scan_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan log: " + path);
  std::vector<Scan2D> scans;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Scan2D scan;
    if (!read_scan_line(line, scan))
      throw std::runtime_error("malformed scan log line: " + line.substr(0, 80));
    scans.push_back(std::move(scan));
  }
  return scans;
}

}  // namespace vinenav
