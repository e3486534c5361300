#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vinenav/geometry.hpp"
#include "vinenav/odometry.hpp"
#include "vinenav/scan.hpp"

// End-row (headland) navigation: cluster the scan into row ends, pick one
// end point per cluster, follow parallel to the row-end line, count the
// passed rows and stop centered on the target corridor.
namespace vinenav {

enum class EndPointPolicy { Nearest, LineFitting };

const char* policy_name(EndPointPolicy p);
EndPointPolicy policy_from_name(const std::string& name);

struct Cluster {
  std::vector<Point2> points;  // ordered by original scan index
  int id = 0;
};

struct EndPoint {
  Point2 position;
  int cluster_id = 0;
  EndPointPolicy policy = EndPointPolicy::Nearest;
};

struct LineModel {
  Point2 point;
  Point2 direction;  // unit length, canonical sign (x > 0, or x == 0 and y > 0)
};

struct EndRowConfig {
  double cluster_tolerance = 0.5;
  int min_cluster_size = 4;
  double neighborhood_radius = 0.3;
  int neighborhood_min_points = 3;
  int ransac_iterations = 100;
  double ransac_threshold = 0.1;
  std::uint32_t rng_seed = 12345;
  EndPointPolicy policy = EndPointPolicy::LineFitting;

  // Headland following.
  double follow_distance = 1.5;    // lateral offset kept from the row-end line
  int rows_to_skip = 1;            // 1 = enter the next corridor
  double corridor_spacing = 2.0;   // row-end pole spacing along the headland
  double heading_gain = 1.5;       // omega per rad of combined steer
  double lateral_gain = 0.4;       // rad per meter of lateral error
  double cruise_speed = 1.0;
};

// Maximal connected components under dist <= tolerance; components below
// min_size are discarded. Ids are assigned by ascending polar angle of
// the cluster centroid.
std::vector<Cluster> euclidean_cluster(const Scan2D& scan, double tolerance, int min_size);

// Nearest cluster point to `robot` among points that have at least
// neighborhood_min_points other cluster points within
// neighborhood_radius. Ties break toward the lowest point index.
std::optional<EndPoint> pick_nearest(const Cluster& cluster, const Point2& robot,
                                     const EndRowConfig& cfg);

// Two-point RANSAC over ransac_iterations (seeded, reproducible), then a
// least-squares refit on the winning inlier set. Throws if the cluster
// carries no direction (all points coincident).
LineModel fit_line_ransac(const Cluster& cluster, const EndRowConfig& cfg);

// Orthogonal projection of p onto the line.
Point2 project_onto_line(const Point2& p, const LineModel& line);

// Nearest policy followed by projection onto the cluster's fitted line.
std::optional<EndPoint> pick_line_fitting(const Cluster& cluster, const Point2& robot,
                                          const EndRowConfig& cfg);

// Picks the configured policy.
std::optional<EndPoint> pick_end_point(const Cluster& cluster, const Point2& robot,
                                       const EndRowConfig& cfg);

// Segment between the end point nearest the robot along the travel axis
// and the next one ahead (behind if nothing is ahead), ordered so b - a
// points forward. Throws if fewer than two end points are given.
Segment2 build_direction_segment(const std::vector<EndPoint>& endpoints);

// One representative per row end. Clusters deep inside the rows produce
// end points far to the side of the headland path; those beyond the
// lateral gate are dropped, the rest are grouped along the travel axis
// (window = half the corridor spacing) and the laterally nearest member
// of each group survives.
std::vector<EndPoint> select_row_end_points(const std::vector<EndPoint>& endpoints,
                                            const EndRowConfig& cfg);

// Track state for one pole across scans (body frame, matched by
// proximity).
struct PoleTrack {
  Point2 position;
  bool counted = false;
  int missed_scans = 0;
};

struct EndRowState {
  std::vector<PoleTrack> tracks;
  int passed_count = 0;
  bool arrived = false;
  bool counting_done = false;
  double remaining_to_stop = 0.0;  // valid once counting_done
  Twist last_command;
  int scans_without_clusters = 0;
};

struct EndRowStepResult {
  Twist command;
  int passed_count = 0;
  bool arrived = false;
  bool degraded = false;  // no clusters for > 1 s of scans
  int cluster_count = 0;
  std::vector<EndPoint> endpoints;
  std::optional<Segment2> segment;
};

// One control update at scan rate. traveled_since_last is the odometric
// distance covered since the previous call (used for the stop at the
// corridor midpoint).
EndRowStepResult end_row_step(const Scan2D& scan, double traveled_since_last,
                              EndRowState& state, const EndRowConfig& cfg);

}  // namespace vinenav
