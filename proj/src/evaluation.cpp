#include "vinenav/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace vinenav {

namespace {

struct CenterLine {
  Point2 origin;
  Point2 dir;  // unit
  double length = 0.0;
};

// Center line of corridor c from the poles of its two bounding rows.
CenterLine corridor_center_line(const World& world, int corridor) {
  if (corridor < 0 || corridor + 1 >= static_cast<int>(world.pole_centers.size()))
    throw std::runtime_error("corridor index out of range: " + std::to_string(corridor));
  const auto& a = world.pole_centers[corridor];
  const auto& b = world.pole_centers[corridor + 1];
  if (a.size() < 2 || b.size() < 2) throw std::runtime_error("row with fewer than 2 poles");
  const Point2 m0 = 0.5 * (a.front() + b.front());
  const Point2 m1 = 0.5 * (a.back() + b.back());
  CenterLine line;
  line.origin = m0;
  line.length = distance(m0, m1);
  line.dir = (1.0 / line.length) * (m1 - m0);
  return line;
}

bool in_span(const CenterLine& line, const Point2& p) {
  const double t = dot(p - line.origin, line.dir);
  return t >= -1e-9 && t <= line.length + 1e-9;
}

double lateral_offset(const CenterLine& line, const Point2& p) {
  return std::abs(cross(line.dir, p - line.origin));
}

long long t_key(double t) { return std::llround(t * 1000.0); }

}  // namespace

DisplacementStats center_displacement(const RunLog& log, const World& world) {
  DisplacementStats stats;
  double sum = 0.0;
  for (const TrajectorySample& s : log.trajectory) {
    if (s.phase != Phase::InRow) continue;
    if (s.corridor + 1 >= static_cast<int>(world.pole_centers.size())) continue;
    const CenterLine line = corridor_center_line(world, s.corridor);
    if (!in_span(line, s.truth.position)) continue;
    const double d = lateral_offset(line, s.truth.position);
    sum += d;
    stats.max = std::max(stats.max, d);
    ++stats.samples;
  }
  if (stats.samples == 0) throw std::runtime_error("center_displacement: no in-row samples");
  stats.mean = sum / stats.samples;
  return stats;
}

WidthStats corridor_width_stats(const RunLog& log, const World& world) {
  std::unordered_map<long long, const TrajectorySample*> by_time;
  for (const TrajectorySample& s : log.trajectory) by_time[t_key(s.t)] = &s;

  WidthStats stats;
  stats.min = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const InRowRecord& r : log.in_row) {
    const auto it = by_time.find(t_key(r.t));
    if (it != by_time.end()) {
      const TrajectorySample& s = *it->second;
      if (s.corridor + 1 < static_cast<int>(world.pole_centers.size())) {
        const CenterLine line = corridor_center_line(world, s.corridor);
        if (!in_span(line, s.truth.position)) continue;
      }
    }
    const double w = r.left + r.right;
    sum += w;
    stats.max = std::max(stats.max, w);
    stats.min = std::min(stats.min, w);
    ++stats.samples;
  }
  if (stats.samples == 0) throw std::runtime_error("corridor_width_stats: no in-row records");
  stats.mean = sum / stats.samples;
  return stats;
}

std::map<std::string, PoleErrorStats> pole_detection_error(const RunLog& log,
                                                           const World& world) {
  std::vector<Point2> end_poles;
  for (const auto& row : world.pole_centers) {
    end_poles.push_back(row.front());
    end_poles.push_back(row.back());
  }
  if (end_poles.empty()) throw std::runtime_error("pole_detection_error: world has no poles");

  struct Accum {
    double sum = 0.0;
    double max = 0.0;
    double min = std::numeric_limits<double>::infinity();
    int n = 0;
    int outliers = 0;
  };
  std::map<std::string, Accum> accum;
  for (const EndRowRecord& r : log.end_row) {
    for (const LoggedEndPoint& ep : r.endpoints) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point2& pole : end_poles) best = std::min(best, distance(pole, ep.world));
      Accum& a = accum[policy_name(ep.policy)];
      if (best > 1.0) {
        ++a.outliers;
        continue;
      }
      a.sum += best;
      a.max = std::max(a.max, best);
      a.min = std::min(a.min, best);
      ++a.n;
    }
  }
  if (accum.empty()) throw std::runtime_error("pole_detection_error: no detections in log");

  std::map<std::string, PoleErrorStats> out;
  for (const auto& [policy, a] : accum) {
    PoleErrorStats s;
    s.samples = a.n;
    s.outliers = a.outliers;
    if (a.n > 0) {
      s.mean = a.sum / a.n;
      s.max = a.max;
      s.min = a.min;
    }
    out[policy] = s;
  }
  return out;
}

MetricsReport compute_metrics(const RunLog& log, const World& world) {
  MetricsReport report;
  report.collisions = log.collisions;
  report.completed = log.completed;
  report.final_phase = log.final_phase;
  try {
    report.displacement = center_displacement(log, world);
  } catch (const std::runtime_error&) {
  }
  try {
    report.width = corridor_width_stats(log, world);
  } catch (const std::runtime_error&) {
  }
  try {
    report.pole_error = pole_detection_error(log, world);
  } catch (const std::runtime_error&) {
  }
  return report;
}

void write_metrics_json(const std::string& path, const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["center_displacement"] = {{"mean", report.displacement.mean},
                              {"max", report.displacement.max},
                              {"samples", report.displacement.samples}};
  j["corridor_width"] = {{"mean", report.width.mean},
                         {"max", report.width.max},
                         {"min", report.width.samples ? report.width.min : 0.0},
                         {"samples", report.width.samples}};
  nlohmann::ordered_json pe = nlohmann::ordered_json::object();
  for (const auto& [policy, s] : report.pole_error)
    pe[policy] = {{"mean", s.mean}, {"max", s.max},     {"min", s.min},
                  {"samples", s.samples}, {"outliers", s.outliers}};
  j["pole_detection_error"] = pe;
  j["collisions"] = report.collisions;
  j["completed"] = report.completed;
  j["final_phase"] = report.final_phase;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics: " + path);
  out << j.dump(1) << "\n";
}

std::string format_metrics_table(const MetricsReport& report) {
  char buf[256];
  std::string s;
  s += "measurement                      value\n";
  std::snprintf(buf, sizeof(buf), "mean center displacement   %10.3f m  (%d samples)\n",
                report.displacement.mean, report.displacement.samples);
  s += buf;
  std::snprintf(buf, sizeof(buf), "max center displacement    %10.3f m\n",
                report.displacement.max);
  s += buf;
  std::snprintf(buf, sizeof(buf), "mean corridor width        %10.3f m  (%d samples)\n",
                report.width.mean, report.width.samples);
  s += buf;
  std::snprintf(buf, sizeof(buf), "max corridor width         %10.3f m\n", report.width.max);
  s += buf;
  std::snprintf(buf, sizeof(buf), "min corridor width         %10.3f m\n",
                report.width.samples ? report.width.min : 0.0);
  s += buf;
  for (const auto& [policy, p] : report.pole_error) {
    std::snprintf(buf, sizeof(buf),
                  "pole error (%-12s)    mean %.3f  max %.3f  min %.3f m  (%d pts, %d outliers)\n",
                  policy.c_str(), p.mean, p.max, p.min, p.samples, p.outliers);
    s += buf;
  }
  std::snprintf(buf, sizeof(buf), "collisions                 %10d\n", report.collisions);
  s += buf;
  std::snprintf(buf, sizeof(buf), "completed                  %10s  (final phase %s)\n",
                report.completed ? "yes" : "no", report.final_phase.c_str());
  s += buf;
  return s;
}

}  // namespace vinenav
