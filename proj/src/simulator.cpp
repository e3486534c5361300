#include "vinenav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vinenav {

const char* stage_name(VegetativeStage s) {
  switch (s) {
    case VegetativeStage::Low: return "low";
    case VegetativeStage::Medium: return "medium";
    case VegetativeStage::High: return "high";
  }
  return "?";
}

VegetativeStage stage_from_name(const std::string& name) {
  if (name == "low") return VegetativeStage::Low;
  if (name == "medium") return VegetativeStage::Medium;
  if (name == "high") return VegetativeStage::High;
  throw std::invalid_argument("unknown vegetative stage: " + name);
}

namespace {

double stage_density_factor(VegetativeStage s) {
  switch (s) {
    case VegetativeStage::Low: return 0.4;
    case VegetativeStage::Medium: return 1.0;
    case VegetativeStage::High: return 1.8;
  }
  return 1.0;
}

double stage_sigma_factor(VegetativeStage s) {
  switch (s) {
    case VegetativeStage::Low: return 0.7;
    case VegetativeStage::Medium: return 1.0;
    case VegetativeStage::High: return 1.3;
  }
  return 1.0;
}

constexpr double kVegetationRadius = 0.02;

}  // namespace

World generate_world(const WorldConfig& cfg) {
  if (cfg.n_rows < 2) throw std::invalid_argument("generate_world: need n_rows >= 2");
  if (!(cfg.row_spacing > 0.0) || !(cfg.pole_spacing > 0.0) || !(cfg.row_length > 0.0))
    throw std::invalid_argument("generate_world: spacings and length must be > 0");

  World world;
  world.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> protrusion(
      0.0, cfg.vegetation_protrusion_sigma * stage_sigma_factor(cfg.vegetative_stage));
  std::normal_distribution<double> jitter_y(0.0, 0.03);
  std::uniform_real_distribution<double> jitter_x(-0.2, 0.2);

  const double density = cfg.vegetation_density * stage_density_factor(cfg.vegetative_stage);
  const int n_clumps =
      std::max(1, static_cast<int>(std::lround(cfg.row_length / cfg.vegetation_clump_spacing)));
  const double clump_len = cfg.row_length / n_clumps;
  const int pts_per_clump = std::max(1, static_cast<int>(std::lround(density * clump_len)));

  for (int row = 0; row < cfg.n_rows; ++row) {
    const double row_y = row * cfg.row_spacing;

    std::vector<Point2> poles;
    for (double x = 0.0; x < cfg.row_length - 1e-9; x += cfg.pole_spacing)
      poles.push_back({x, row_y});
    poles.push_back({cfg.row_length, row_y});
    for (const Point2& p : poles) world.obstacles.push_back({p, cfg.pole_radius});
    world.pole_centers.push_back(std::move(poles));

    for (int c = 0; c < n_clumps; ++c) {
      const double cx = (c + 0.5) * clump_len;
      const double base = protrusion(rng);
      for (int k = 0; k < pts_per_clump; ++k) {
        const double x = std::clamp(cx + jitter_x(rng), 0.0, cfg.row_length);
        const double y = row_y + base + jitter_y(rng);
        world.obstacles.push_back({{x, y}, kVegetationRadius});
      }
    }
  }
  return world;
}

void write_world(const std::string& path, const World& world) {
  nlohmann::ordered_json j;
  const WorldConfig& c = world.config;
  j["config"] = {{"n_rows", c.n_rows},
                 {"row_length", c.row_length},
                 {"row_spacing", c.row_spacing},
                 {"pole_spacing", c.pole_spacing},
                 {"pole_radius", c.pole_radius},
                 {"vegetative_stage", stage_name(c.vegetative_stage)},
                 {"vegetation_density", c.vegetation_density},
                 {"vegetation_protrusion_sigma", c.vegetation_protrusion_sigma},
                 {"vegetation_clump_spacing", c.vegetation_clump_spacing},
                 {"seed", c.seed}};
  auto& rows = j["pole_centers"] = nlohmann::ordered_json::array();
  for (const auto& row : world.pole_centers) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Point2& p : row) r.push_back({p.x, p.y});
    rows.push_back(std::move(r));
  }
  auto& obs = j["obstacles"] = nlohmann::ordered_json::array();
  for (const CircleObstacle& o : world.obstacles)
    obs.push_back({o.center.x, o.center.y, o.radius});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write world file: " + path);
  out << j.dump(1) << "\n";
}

World load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file: " + path);
  nlohmann::json j;
  in >> j;

  World world;
  const auto& c = j.at("config");
  world.config.n_rows = c.at("n_rows").get<int>();
  world.config.row_length = c.at("row_length").get<double>();
  world.config.row_spacing = c.at("row_spacing").get<double>();
  world.config.pole_spacing = c.at("pole_spacing").get<double>();
  world.config.pole_radius = c.at("pole_radius").get<double>();
  world.config.vegetative_stage = stage_from_name(c.at("vegetative_stage").get<std::string>());
  world.config.vegetation_density = c.at("vegetation_density").get<double>();
  world.config.vegetation_protrusion_sigma = c.at("vegetation_protrusion_sigma").get<double>();
  world.config.vegetation_clump_spacing = c.at("vegetation_clump_spacing").get<double>();
  world.config.seed = c.at("seed").get<std::uint64_t>();

  for (const auto& row : j.at("pole_centers")) {
    std::vector<Point2> poles;
    for (const auto& p : row) poles.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    world.pole_centers.push_back(std::move(poles));
  }
  for (const auto& o : j.at("obstacles"))
    world.obstacles.push_back(
        {{o.at(0).get<double>(), o.at(1).get<double>()}, o.at(2).get<double>()});
  return world;
}

Raycaster::Raycaster(const World& world, double cell) : world_(world), cell_(cell) {
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    const CircleObstacle& o = world.obstacles[i];
    const std::int64_t x0 = coord(o.center.x - o.radius);
    const std::int64_t x1 = coord(o.center.x + o.radius);
    const std::int64_t y0 = coord(o.center.y - o.radius);
    const std::int64_t y1 = coord(o.center.y + o.radius);
    for (std::int64_t cx = x0; cx <= x1; ++cx)
      for (std::int64_t cy = y0; cy <= y1; ++cy)
        buckets_[(static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
                 static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy))]
            .push_back(i);
  }
}

std::int64_t Raycaster::coord(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_));
}

namespace {

// Smallest positive ray parameter hitting the circle, or negative.
double ray_circle(const Point2& o, const Point2& d, const CircleObstacle& c) {
  const Point2 oc = c.center - o;
  const double t = dot(oc, d);
  const double closest2 = dot(oc, oc) - t * t;
  const double r2 = c.radius * c.radius;
  if (closest2 > r2) return -1.0;
  const double half = std::sqrt(r2 - closest2);
  const double t0 = t - half;
  if (t0 > 0.0) return t0;
  const double t1 = t + half;
  return t1 > 0.0 ? t1 : -1.0;
}

}  // namespace

double Raycaster::cast(const Point2& origin, const Point2& dir, double max_range) const {
  // DDA over grid cells; stop as soon as the best hit precedes the next cell.
  std::int64_t cx = coord(origin.x);
  std::int64_t cy = coord(origin.y);
  const std::int64_t step_x = dir.x > 0.0 ? 1 : -1;
  const std::int64_t step_y = dir.y > 0.0 ? 1 : -1;
  const double inv_dx = dir.x != 0.0 ? 1.0 / dir.x : 0.0;
  const double inv_dy = dir.y != 0.0 ? 1.0 / dir.y : 0.0;
  double t_next_x = dir.x != 0.0
                        ? ((cx + (step_x > 0 ? 1 : 0)) * cell_ - origin.x) * inv_dx
                        : std::numeric_limits<double>::infinity();
  double t_next_y = dir.y != 0.0
                        ? ((cy + (step_y > 0 ? 1 : 0)) * cell_ - origin.y) * inv_dy
                        : std::numeric_limits<double>::infinity();
  const double t_delta_x = dir.x != 0.0 ? cell_ * std::abs(inv_dx)
                                        : std::numeric_limits<double>::infinity();
  const double t_delta_y = dir.y != 0.0 ? cell_ * std::abs(inv_dy)
                                        : std::numeric_limits<double>::infinity();

  double best = -1.0;
  double t_cell = 0.0;
  while (t_cell <= max_range) {
    if (best > 0.0 && best <= t_cell) break;
    const auto it =
        buckets_.find((static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
                      static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy)));
    if (it != buckets_.end()) {
      for (std::size_t i : it->second) {
        const double t = ray_circle(origin, dir, world_.obstacles[i]);
        if (t > 0.0 && t <= max_range && (best < 0.0 || t < best)) best = t;
      }
    }
    if (t_next_x < t_next_y) {
      t_cell = t_next_x;
      t_next_x += t_delta_x;
      cx += step_x;
    } else {
      t_cell = t_next_y;
      t_next_y += t_delta_y;
      cy += step_y;
    }
  }
  return best;
}

RawScan Raycaster::scan(const Pose2& sensor_pose, const SensorConfig& cfg,
                        std::mt19937_64& rng) const {
  RawScan raw;
  raw.beams.reserve(cfg.beams);
  std::normal_distribution<double> noise(0.0, cfg.range_noise_sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double c = std::cos(sensor_pose.heading);
  const double s = std::sin(sensor_pose.heading);
  for (int k = 0; k < cfg.beams; ++k) {
    const double b = -M_PI + 2.0 * M_PI * k / cfg.beams;
    const Point2 body_dir{std::cos(b), std::sin(b)};
    const Point2 world_dir{c * body_dir.x - s * body_dir.y, s * body_dir.x + c * body_dir.y};
    double range = cast(sensor_pose.position, world_dir, cfg.max_range);
    if (range > 0.0) {
      if (cfg.range_noise_sigma > 0.0) range += noise(rng);
      if (cfg.dropout_probability > 0.0 && unit(rng) < cfg.dropout_probability)
        range = kNoReturn;
      else if (range < cfg.min_range || range > cfg.max_range)
        range = kNoReturn;
    } else {
      range = kNoReturn;
    }
    raw.beams.push_back({b, range});
  }
  return raw;
}

bool Raycaster::collides(const Point2& position, double footprint_radius) const {
  const std::int64_t x0 = coord(position.x - footprint_radius);
  const std::int64_t x1 = coord(position.x + footprint_radius);
  const std::int64_t y0 = coord(position.y - footprint_radius);
  const std::int64_t y1 = coord(position.y + footprint_radius);
  for (std::int64_t cx = x0; cx <= x1; ++cx) {
    for (std::int64_t cy = y0; cy <= y1; ++cy) {
      const auto it =
          buckets_.find((static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
                        static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy)));
      if (it == buckets_.end()) continue;
      for (std::size_t i : it->second) {
        const CircleObstacle& o = world_.obstacles[i];
        if (distance(o.center, position) <= footprint_radius + o.radius) return true;
      }
    }
  }
  return false;
}

RawScan raycast_scan(const World& world, const Pose2& sensor_pose, const SensorConfig& cfg,
                     std::mt19937_64& rng) {
  return Raycaster(world).scan(sensor_pose, cfg, rng);
}

Twist clamp_twist(const Twist& twist, const DynamicsConfig& cfg) {
  Twist out = twist;
  out.v_y = std::clamp(out.v_y, -cfg.v_limit, cfg.v_limit);
  out.omega_z = std::clamp(out.omega_z, -cfg.omega_limit, cfg.omega_limit);
  return out;
}

Pose2 step_dynamics(const Pose2& pose, const TreadSpeeds& treads, const DynamicsConfig& cfg,
                    const KinematicParams& params, double dt) {
  Twist twist = clamp_twist(tread_to_twist(treads, params), cfg);
  twist.omega_z *= (1.0 - cfg.slip_factor);
  return integrate_pose(pose, twist, dt);
}

}  // namespace vinenav
