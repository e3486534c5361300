#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "vinenav/geometry.hpp"
#include "vinenav/odometry.hpp"
#include "vinenav/scan.hpp"

// Deterministic 2D vineyard world, raycast range sensor and skid-steer
// ground-truth dynamics. Rows run along +x, row j sits at
// y = j * row_spacing; corridors are the gaps between adjacent rows.
namespace vinenav {

enum class VegetativeStage { Low, Medium, High };

const char* stage_name(VegetativeStage s);
VegetativeStage stage_from_name(const std::string& name);

struct WorldConfig {
  int n_rows = 4;  // 4 rows bound 3 corridors
  double row_length = 36.0;
  double row_spacing = 2.0;
  double pole_spacing = 6.0;
  double pole_radius = 0.05;
  VegetativeStage vegetative_stage = VegetativeStage::Medium;
  double vegetation_density = 8.0;  // points per meter at medium stage
  double vegetation_protrusion_sigma = 0.15;
  double vegetation_clump_spacing = 0.4;  // plants sharing one protrusion offset
  std::uint64_t seed = 1;
};

struct CircleObstacle {
  Point2 center;
  double radius = 0.0;
};

struct World {
  WorldConfig config;
  std::vector<CircleObstacle> obstacles;           // poles and vegetation
  std::vector<std::vector<Point2>> pole_centers;   // per row, ordered by x
};

struct SensorConfig {
  double rate_hz = 10.0;
  int beams = 1024;
  double max_range = 20.0;
  double min_range = 0.8;
  double range_noise_sigma = 0.01;
  double dropout_probability = 0.0;
};

struct DynamicsConfig {
  double odom_rate_hz = 50.0;
  double slip_factor = 0.0;  // fraction of commanded rotation lost to skid
  double v_limit = 2.0;
  double omega_limit = 1.5;
  double footprint_radius = 0.35;
};

// Procedural world: poles at every pole_spacing with one at each row end;
// vegetation sampled in clumps along each row line, lateral offsets
// normal with the configured sigma. Low/medium/high stages scale density
// by 0.4/1.0/1.8 and sigma by 0.7/1.0/1.3. Deterministic given the seed.
World generate_world(const WorldConfig& cfg);

void write_world(const std::string& path, const World& world);
World load_world(const std::string& path);

// Grid-bucketed raycaster over a fixed world (the per-run hot path).
class Raycaster {
 public:
  explicit Raycaster(const World& world, double cell = 0.5);

  // Nearest obstacle hit along the ray, or a negative value if nothing is
  // hit within max_range.
  double cast(const Point2& origin, const Point2& unit_dir, double max_range) const;

  RawScan scan(const Pose2& sensor_pose, const SensorConfig& cfg, std::mt19937_64& rng) const;

  bool collides(const Point2& position, double footprint_radius) const;

 private:
  std::int64_t coord(double v) const;
  const World& world_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

// Convenience wrapper for tests and one-off scans.
RawScan raycast_scan(const World& world, const Pose2& sensor_pose, const SensorConfig& cfg,
                     std::mt19937_64& rng);

// Ground-truth motion: Eq-style tread kinematics, rotation scaled by
// (1 - slip_factor), speeds clamped to the limits, exact arc integration.
Pose2 step_dynamics(const Pose2& pose, const TreadSpeeds& treads, const DynamicsConfig& cfg,
                    const KinematicParams& params, double dt);

// Clamp a commanded twist to the dynamic limits (shared by the simulator
// and the odometry reconstruction, so both sides agree bit-for-bit).
Twist clamp_twist(const Twist& twist, const DynamicsConfig& cfg);

}  // namespace vinenav
