#include "vinenav/end_row.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

#include "vinenav/grid_index.hpp"

namespace vinenav {

namespace {
constexpr double kPassHysteresis = 0.2;  // meters past abreast before a pole counts
constexpr double kTrackMatchGate = 1.0;  // max body-frame jump between scans
constexpr int kTrackMaxMissed = 5;
constexpr int kDegradedScans = 10;  // > 1 s at 10 Hz
}  // namespace

const char* policy_name(EndPointPolicy p) {
  return p == EndPointPolicy::Nearest ? "nearest" : "line_fitting";
}

EndPointPolicy policy_from_name(const std::string& name) {
  if (name == "nearest") return EndPointPolicy::Nearest;
  if (name == "line_fitting") return EndPointPolicy::LineFitting;
  throw std::invalid_argument("unknown end point policy: " + name);
}

std::vector<Cluster> euclidean_cluster(const Scan2D& scan, double tolerance, int min_size) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("euclidean_cluster: tolerance must be > 0");
  const std::size_t n = scan.points.size();
  std::vector<Cluster> clusters;
  if (n == 0) return clusters;

  GridIndex grid(scan.points, tolerance);
  const double tol2 = tolerance * tolerance;
  std::vector<int> label(n, -1);
  std::vector<std::vector<std::size_t>> members;

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::queue<std::size_t> frontier;
    label[seed] = id;
    frontier.push(seed);
    while (!frontier.empty()) {
      const std::size_t i = frontier.front();
      frontier.pop();
      members[id].push_back(i);
      grid.for_each_candidate(scan.points[i], [&](std::size_t j) {
        if (label[j] < 0) {
          const Point2 d = scan.points[j] - scan.points[i];
          if (d.x * d.x + d.y * d.y <= tol2) {
            label[j] = id;
            frontier.push(j);
          }
        }
        return false;
      });
    }
  }

  struct Keyed {
    double angle;
    std::size_t first_index;
    std::vector<std::size_t> members;
  };
  std::vector<Keyed> keyed;
  for (auto& m : members) {
    if (static_cast<int>(m.size()) < min_size) continue;
    std::sort(m.begin(), m.end());
    Point2 centroid{0.0, 0.0};
    for (std::size_t i : m) centroid = centroid + scan.points[i];
    centroid = (1.0 / static_cast<double>(m.size())) * centroid;
    keyed.push_back({std::atan2(centroid.y, centroid.x), m.front(), std::move(m)});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.first_index < b.first_index;
  });

  clusters.reserve(keyed.size());
  for (std::size_t id = 0; id < keyed.size(); ++id) {
    Cluster c;
    c.id = static_cast<int>(id);
    c.points.reserve(keyed[id].members.size());
    for (std::size_t i : keyed[id].members) c.points.push_back(scan.points[i]);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

std::optional<EndPoint> pick_nearest(const Cluster& cluster, const Point2& robot,
                                     const EndRowConfig& cfg) {
  const double r2 = cfg.neighborhood_radius * cfg.neighborhood_radius;
  int best = -1;
  double best_dist = 0.0;
  for (std::size_t i = 0; i < cluster.points.size(); ++i) {
    int neighbors = 0;
    for (std::size_t j = 0; j < cluster.points.size(); ++j) {
      if (j == i) continue;
      const Point2 d = cluster.points[j] - cluster.points[i];
      if (d.x * d.x + d.y * d.y <= r2 && ++neighbors >= cfg.neighborhood_min_points) break;
    }
    if (neighbors < cfg.neighborhood_min_points) continue;
    const double dist = distance(cluster.points[i], robot);
    if (best < 0 || dist < best_dist) {
      best = static_cast<int>(i);
      best_dist = dist;
    }
  }
  if (best < 0) return std::nullopt;
  return EndPoint{cluster.points[best], cluster.id, EndPointPolicy::Nearest};
}

namespace {

Point2 canonical_direction(Point2 d) {
  const double len = norm(d);
  d = (1.0 / len) * d;
  if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) d = -1.0 * d;
  return d;
}

double point_line_distance(const Point2& p, const Point2& origin, const Point2& unit_dir) {
  return std::abs(cross(unit_dir, p - origin));
}

}  // namespace

LineModel fit_line_ransac(const Cluster& cluster, const EndRowConfig& cfg) {
  const std::size_t n = cluster.points.size();
  if (n < 2) throw std::invalid_argument("fit_line_ransac: need at least 2 points");

  std::mt19937 rng(cfg.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  int best_inliers = -1;
  Point2 best_origin, best_dir;
  for (int it = 0; it < cfg.ransac_iterations; ++it) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    int guard = 0;
    while (j == i && ++guard < 64) j = pick(rng);
    if (j == i) continue;
    const Point2 d = cluster.points[j] - cluster.points[i];
    if (norm(d) < 1e-12) continue;
    const Point2 dir = canonical_direction(d);
    int inliers = 0;
    for (const Point2& p : cluster.points)
      if (point_line_distance(p, cluster.points[i], dir) <= cfg.ransac_threshold) ++inliers;
    if (inliers > best_inliers) {
      best_inliers = inliers;
      best_origin = cluster.points[i];
      best_dir = dir;
    }
  }
  if (best_inliers < 0)
    throw std::runtime_error("fit_line_ransac: degenerate cluster (all points coincident)");

  // Least-squares refit on the winning inlier set: centroid plus the
  // principal direction of the inlier covariance.
  Point2 centroid{0.0, 0.0};
  std::vector<const Point2*> inliers;
  for (const Point2& p : cluster.points) {
    if (point_line_distance(p, best_origin, best_dir) <= cfg.ransac_threshold) {
      inliers.push_back(&p);
      centroid = centroid + p;
    }
  }
  centroid = (1.0 / static_cast<double>(inliers.size())) * centroid;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Point2* p : inliers) {
    const Point2 d = *p - centroid;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  LineModel model;
  model.point = centroid;
  if (sxx == 0.0 && syy == 0.0) {
    model.direction = best_dir;  // inliers collapsed; keep the sample direction
  } else {
    const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    model.direction = canonical_direction({std::cos(angle), std::sin(angle)});
  }
  return model;
}

Point2 project_onto_line(const Point2& p, const LineModel& line) {
  const double t = dot(p - line.point, line.direction);
  return line.point + t * line.direction;
}

std::optional<EndPoint> pick_line_fitting(const Cluster& cluster, const Point2& robot,
                                          const EndRowConfig& cfg) {
  auto nearest = pick_nearest(cluster, robot, cfg);
  if (!nearest) return std::nullopt;
  const LineModel line = fit_line_ransac(cluster, cfg);
  return EndPoint{project_onto_line(nearest->position, line), cluster.id,
                  EndPointPolicy::LineFitting};
}

std::optional<EndPoint> pick_end_point(const Cluster& cluster, const Point2& robot,
                                       const EndRowConfig& cfg) {
  return cfg.policy == EndPointPolicy::Nearest ? pick_nearest(cluster, robot, cfg)
                                               : pick_line_fitting(cluster, robot, cfg);
}

Segment2 build_direction_segment(const std::vector<EndPoint>& endpoints) {
  if (endpoints.size() < 2)
    throw std::invalid_argument("build_direction_segment: need at least 2 end points");

  // Nearest end point along the travel axis, then its neighbor ahead.
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < endpoints.size(); ++i)
    if (std::abs(endpoints[i].position.y) < std::abs(endpoints[nearest].position.y)) nearest = i;

  const double y0 = endpoints[nearest].position.y;
  int ahead = -1, behind = -1;
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    if (i == nearest) continue;
    const double y = endpoints[i].position.y;
    if (y > y0 && (ahead < 0 || y < endpoints[ahead].position.y)) ahead = static_cast<int>(i);
    if (y <= y0 && (behind < 0 || y > endpoints[behind].position.y)) behind = static_cast<int>(i);
  }
  const std::size_t other = ahead >= 0 ? static_cast<std::size_t>(ahead)
                                       : static_cast<std::size_t>(behind);

  Segment2 seg{endpoints[nearest].position, endpoints[other].position};
  if (seg.b.y < seg.a.y) std::swap(seg.a, seg.b);
  return seg;
}

std::vector<EndPoint> select_row_end_points(const std::vector<EndPoint>& endpoints,
                                            const EndRowConfig& cfg) {
  const double lateral_gate = cfg.follow_distance + 1.5;
  std::vector<EndPoint> gated;
  for (const EndPoint& ep : endpoints)
    if (std::abs(ep.position.x) <= lateral_gate) gated.push_back(ep);
  std::sort(gated.begin(), gated.end(),
            [](const EndPoint& a, const EndPoint& b) { return a.position.y < b.position.y; });

  std::vector<EndPoint> reps;
  const double window = cfg.corridor_spacing / 2.0;
  double group_last_y = 0.0;
  for (const EndPoint& ep : gated) {
    if (!reps.empty() && ep.position.y - group_last_y < window) {
      if (std::abs(ep.position.x) < std::abs(reps.back().position.x)) reps.back() = ep;
    } else {
      reps.push_back(ep);
    }
    group_last_y = ep.position.y;
  }
  return reps;
}

namespace {

void update_tracks(EndRowState& state, const std::vector<EndPoint>& endpoints) {
  std::vector<bool> matched(state.tracks.size(), false);
  for (const EndPoint& ep : endpoints) {
    int best = -1;
    double best_d = kTrackMatchGate;
    for (std::size_t t = 0; t < state.tracks.size(); ++t) {
      if (matched[t]) continue;
      const double d = distance(state.tracks[t].position, ep.position);
      if (d < best_d) {
        best = static_cast<int>(t);
        best_d = d;
      }
    }
    if (best >= 0) {
      state.tracks[best].position = ep.position;
      state.tracks[best].missed_scans = 0;
      matched[best] = true;
    } else {
      PoleTrack track;
      track.position = ep.position;
      // A pole first seen already behind the robot was passed before
      // tracking started; do not count it.
      track.counted = ep.position.y < kPassHysteresis;
      state.tracks.push_back(track);
      matched.push_back(true);
    }
  }
  for (std::size_t t = 0; t < state.tracks.size(); ++t)
    if (!matched[t]) ++state.tracks[t].missed_scans;
  std::erase_if(state.tracks,
                [](const PoleTrack& t) { return t.missed_scans > kTrackMaxMissed; });
}

}  // namespace

EndRowStepResult end_row_step(const Scan2D& scan, double traveled_since_last,
                              EndRowState& state, const EndRowConfig& cfg) {
  EndRowStepResult out;

  if (state.arrived) {
    state.last_command = Twist{};
    out.passed_count = state.passed_count;
    out.arrived = true;
    return out;
  }

  const auto clusters = euclidean_cluster(scan, cfg.cluster_tolerance, cfg.min_cluster_size);
  out.cluster_count = static_cast<int>(clusters.size());
  if (clusters.empty()) {
    ++state.scans_without_clusters;
    out.degraded = state.scans_without_clusters > kDegradedScans;
    out.command = state.last_command;  // hold
    out.passed_count = state.passed_count;
    return out;
  }
  state.scans_without_clusters = 0;

  const Point2 robot{0.0, 0.0};
  for (const Cluster& c : clusters) {
    if (auto ep = pick_end_point(c, robot, cfg)) out.endpoints.push_back(*ep);
  }

  // Steer and count against one representative per row end; raw endpoints
  // stay in the result for logging.
  const std::vector<EndPoint> row_ends = select_row_end_points(out.endpoints, cfg);

  update_tracks(state, row_ends);

  Twist cmd;
  cmd.v_y = cfg.cruise_speed;
  // Travel direction along the row-end line; body-forward until a segment
  // is available.
  Point2 travel_dir{0.0, 1.0};
  if (row_ends.size() >= 2) {
    const Segment2 seg = build_direction_segment(row_ends);
    out.segment = seg;
    const Point2 dir = canonical_direction(seg.b - seg.a);
    const Point2 forward_dir = dir.y >= 0.0 ? dir : -1.0 * dir;
    travel_dir = forward_dir;
    const double heading_err = bearing(forward_dir);

    // Lateral position of the row-end line in the body frame (foot of the
    // perpendicular from the robot).
    const Point2 foot = seg.a + dot(-1.0 * seg.a, forward_dir) * forward_dir;
    const double line_x = foot.x;
    const double dist = std::abs(line_x);
    const double side = line_x < 0.0 ? 1.0 : -1.0;  // +1: line on the left
    const double lateral_term = side * cfg.lateral_gain * (dist - cfg.follow_distance);

    const double steer = std::clamp(heading_err + lateral_term, -0.5, 0.5);
    cmd.omega_z = cfg.heading_gain * steer;
  } else {
    // Single end point: hold the previous heading command.
    cmd.omega_z = state.last_command.omega_z;
  }

  if (state.counting_done) state.remaining_to_stop -= traveled_since_last;

  // Passed-pole counting along the travel direction, insensitive to the
  // robot's momentary heading error.
  for (PoleTrack& track : state.tracks) {
    const double along = dot(track.position, travel_dir);
    if (!track.counted && along < -kPassHysteresis) {
      track.counted = true;
      ++state.passed_count;
      if (state.passed_count == cfg.rows_to_skip && !state.counting_done) {
        state.counting_done = true;
        // Midpoint of the target corridor, measured from where the pole
        // actually crossed behind the robot.
        state.remaining_to_stop = cfg.corridor_spacing / 2.0 + along;
      }
    }
  }

  if (state.counting_done) {
    if (state.remaining_to_stop <= 0.0) {
      state.arrived = true;
      state.last_command = Twist{};
      out.command = Twist{};
      out.passed_count = state.passed_count;
      out.arrived = true;
      return out;
    }
  }

  state.last_command = cmd;
  out.command = cmd;
  out.passed_count = state.passed_count;
  return out;
}

}  // namespace vinenav
