#pragma once

#include <map>
#include <string>

#include "vinenav/run_log.hpp"
#include "vinenav/simulator.hpp"

// Offline metrics over run logs: center displacement, corridor width
// statistics and row-end point detection error.
namespace vinenav {

struct DisplacementStats {
  double mean = 0.0;
  double max = 0.0;
  int samples = 0;
};

struct WidthStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  int samples = 0;
};

struct PoleErrorStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  int samples = 0;
  int outliers = 0;  // detections farther than 1 m from any pole
};

// |perpendicular distance| from the ground-truth position to the center
// line of the corridor being traversed, over in-row samples inside the
// row span. The center line is derived from the bounding rows' poles, so
// the metric is rigid-transform invariant.
DisplacementStats center_displacement(const RunLog& log, const World& world);

// Stats of (left + right) side distances over in-row records taken inside
// the row span.
WidthStats corridor_width_stats(const RunLog& log, const World& world);

// Per policy: Euclidean distance from each detected end point to the
// nearest true row-end pole center. Detections beyond 1 m of any pole are
// counted as outliers and excluded from the stats.
std::map<std::string, PoleErrorStats> pole_detection_error(const RunLog& log,
                                                           const World& world);

struct MetricsReport {
  DisplacementStats displacement;
  WidthStats width;
  std::map<std::string, PoleErrorStats> pole_error;
  int collisions = 0;
  bool completed = false;
  std::string final_phase;
};

MetricsReport compute_metrics(const RunLog& log, const World& world);

void write_metrics_json(const std::string& path, const MetricsReport& report);
std::string format_metrics_table(const MetricsReport& report);

}  // namespace vinenav
