#include "vinenav/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vinenav {

namespace {

using nlohmann::json;

// Applies known keys via `field(...)` calls and rejects everything else.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void field(const char* name, T& target) {
    known_.insert(name);
    const auto it = j_.find(name);
    if (it == j_.end()) return;
    try {
      target = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + name + ": " + e.what());
    }
  }

  const json* subsection(const char* name) {
    known_.insert(name);
    const auto it = j_.find(name);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!known_.count(key)) throw ConfigError(path_ + ": unknown field \"" + key + "\"");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

void parse_world(const json& j, WorldConfig& cfg) {
  Section s(j, "world");
  s.field("n_rows", cfg.n_rows);
  s.field("row_length", cfg.row_length);
  s.field("row_spacing", cfg.row_spacing);
  s.field("pole_spacing", cfg.pole_spacing);
  s.field("pole_radius", cfg.pole_radius);
  std::string stage = stage_name(cfg.vegetative_stage);
  s.field("vegetative_stage", stage);
  try {
    cfg.vegetative_stage = stage_from_name(stage);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("world.vegetative_stage: ") + e.what());
  }
  s.field("vegetation_density", cfg.vegetation_density);
  s.field("vegetation_protrusion_sigma", cfg.vegetation_protrusion_sigma);
  s.field("vegetation_clump_spacing", cfg.vegetation_clump_spacing);
  s.field("seed", cfg.seed);
  s.finish();
}

void parse_sensor(const json& j, SensorConfig& cfg) {
  Section s(j, "sensor");
  s.field("rate_hz", cfg.rate_hz);
  s.field("beams", cfg.beams);
  s.field("max_range", cfg.max_range);
  s.field("min_range", cfg.min_range);
  s.field("range_noise_sigma", cfg.range_noise_sigma);
  s.field("dropout_probability", cfg.dropout_probability);
  s.finish();
}

void parse_dynamics(const json& j, DynamicsConfig& cfg) {
  Section s(j, "dynamics");
  s.field("odom_rate_hz", cfg.odom_rate_hz);
  s.field("slip_factor", cfg.slip_factor);
  s.field("v_limit", cfg.v_limit);
  s.field("omega_limit", cfg.omega_limit);
  s.field("footprint_radius", cfg.footprint_radius);
  s.finish();
}

void parse_kinematics(const json& j, KinematicParams& cfg) {
  Section s(j, "kinematics");
  s.field("alpha", cfg.alpha);
  s.field("x_icr", cfg.x_icr);
  s.finish();
}

void parse_filter(const json& j, FilterConfig& cfg) {
  Section s(j, "filter");
  s.field("min_range", cfg.min_range);
  s.field("max_range", cfg.max_range);
  s.field("downsample_keep_every", cfg.downsample_keep_every);
  s.field("outlier_radius", cfg.outlier_radius);
  s.field("outlier_min_neighbors", cfg.outlier_min_neighbors);
  s.finish();
}

void parse_in_row(const json& j, InRowConfig& cfg) {
  Section s(j, "in_row");
  s.field("cone_length", cfg.cone_length);
  s.field("cone_angle_step", cfg.cone_angle_step);
  s.field("cone_max_half_angle", cfg.cone_max_half_angle);
  s.field("cone_point_threshold", cfg.cone_point_threshold);
  s.field("side_rect_length", cfg.side_rect_length);
  s.field("side_rect_growth_step", cfg.side_rect_growth_step);
  s.field("side_rect_max_width", cfg.side_rect_max_width);
  s.field("side_rect_point_threshold", cfg.side_rect_point_threshold);
  s.field("center_gain", cfg.center_gain);
  s.field("lookahead", cfg.lookahead);
  s.field("pid_kp", cfg.pid.kp);
  s.field("pid_ki", cfg.pid.ki);
  s.field("pid_kd", cfg.pid.kd);
  s.field("pid_integral_limit", cfg.pid_integral_limit);
  s.field("v_max", cfg.v_max);
  s.field("governor_length", cfg.governor_length);
  s.field("governor_width", cfg.governor_width);
  s.field("governor_stop_distance", cfg.governor_stop_distance);
  s.field("end_rect_length", cfg.end_rect_length);
  s.field("end_rect_width", cfg.end_rect_width);
  s.field("end_point_threshold", cfg.end_point_threshold);
  s.field("exit_distance", cfg.exit_distance);
  s.finish();
}

void parse_turn(const json& j, TurnConfig& cfg) {
  Section s(j, "turn");
  s.field("turn_angle", cfg.turn_angle);
  std::string dir = cfg.direction_first == TurnDirection::Left ? "left" : "right";
  s.field("direction_first", dir);
  if (dir == "left") cfg.direction_first = TurnDirection::Left;
  else if (dir == "right") cfg.direction_first = TurnDirection::Right;
  else throw ConfigError("turn.direction_first: must be \"left\" or \"right\"");
  s.field("omega_turn", cfg.omega_turn);
  s.field("alignment_tolerance", cfg.alignment_tolerance);
  s.finish();
}

void parse_end_row(const json& j, EndRowConfig& cfg) {
  Section s(j, "end_row");
  s.field("cluster_tolerance", cfg.cluster_tolerance);
  s.field("min_cluster_size", cfg.min_cluster_size);
  s.field("neighborhood_radius", cfg.neighborhood_radius);
  s.field("neighborhood_min_points", cfg.neighborhood_min_points);
  s.field("ransac_iterations", cfg.ransac_iterations);
  s.field("ransac_threshold", cfg.ransac_threshold);
  s.field("rng_seed", cfg.rng_seed);
  std::string policy = policy_name(cfg.policy);
  s.field("policy", policy);
  try {
    cfg.policy = policy_from_name(policy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("end_row.policy: ") + e.what());
  }
  s.field("follow_distance", cfg.follow_distance);
  s.field("rows_to_skip", cfg.rows_to_skip);
  s.field("corridor_spacing", cfg.corridor_spacing);
  s.field("heading_gain", cfg.heading_gain);
  s.field("lateral_gain", cfg.lateral_gain);
  s.field("cruise_speed", cfg.cruise_speed);
  s.finish();
}

void parse_navigator(const json& j, NavigatorConfig& cfg) {
  Section s(j, "navigator");
  s.field("degraded_timeout_s", cfg.degraded_timeout_s);
  s.field("stall_timeout_s", cfg.stall_timeout_s);
  s.finish();
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig cfg;
  Section root(j, "config");
  root.field("seed", cfg.seed);
  root.field("corridors_to_traverse", cfg.corridors_to_traverse);
  root.field("output_dir", cfg.output_dir);
  root.field("log_scans", cfg.log_scans);
  if (const json* s = root.subsection("world")) parse_world(*s, cfg.world);
  if (const json* s = root.subsection("sensor")) parse_sensor(*s, cfg.sensor);
  if (const json* s = root.subsection("dynamics")) parse_dynamics(*s, cfg.dynamics);
  if (const json* s = root.subsection("kinematics")) parse_kinematics(*s, cfg.kinematics);
  if (const json* s = root.subsection("filter")) parse_filter(*s, cfg.filter);
  if (const json* s = root.subsection("in_row")) parse_in_row(*s, cfg.in_row);
  if (const json* s = root.subsection("turn")) parse_turn(*s, cfg.turn);
  if (const json* s = root.subsection("end_row")) parse_end_row(*s, cfg.end_row);
  if (const json* s = root.subsection("navigator")) parse_navigator(*s, cfg.navigator);
  root.finish();

  cfg.navigator.corridors_to_traverse = cfg.corridors_to_traverse;
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void validate(const RunConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config invariant violated: ") + what);
  };
  require(cfg.world.n_rows >= 2, "world.n_rows >= 2");
  require(cfg.world.row_spacing > 0.0, "world.row_spacing > 0");
  require(cfg.world.row_length > 0.0, "world.row_length > 0");
  require(cfg.world.pole_spacing > 0.0, "world.pole_spacing > 0");
  require(cfg.sensor.rate_hz > 0.0, "sensor.rate_hz > 0");
  require(cfg.sensor.beams >= 16, "sensor.beams >= 16");
  require(cfg.sensor.min_range >= 0.0 && cfg.sensor.min_range < cfg.sensor.max_range,
          "sensor.min_range in [0, max_range)");
  require(cfg.dynamics.odom_rate_hz > 0.0, "dynamics.odom_rate_hz > 0");
  require(cfg.dynamics.slip_factor >= 0.0 && cfg.dynamics.slip_factor < 1.0,
          "dynamics.slip_factor in [0, 1)");
  require(cfg.kinematics.alpha > 0.0, "kinematics.alpha > 0");
  require(cfg.kinematics.x_icr != 0.0, "kinematics.x_icr != 0");
  require(cfg.filter.min_range >= 0.0 && cfg.filter.min_range < cfg.filter.max_range,
          "filter.min_range in [0, max_range)");
  require(cfg.filter.downsample_keep_every >= 1, "filter.downsample_keep_every >= 1");
  require(cfg.filter.outlier_radius > 0.0, "filter.outlier_radius > 0");
  require(cfg.in_row.cone_length > 0.0, "in_row.cone_length > 0");
  require(cfg.in_row.cone_angle_step > 0.0, "in_row.cone_angle_step > 0");
  require(cfg.in_row.cone_max_half_angle > 0.0 && cfg.in_row.cone_max_half_angle < M_PI / 2,
          "in_row.cone_max_half_angle in (0, pi/2)");
  require(cfg.in_row.cone_point_threshold >= 1, "in_row.cone_point_threshold >= 1");
  require(cfg.in_row.side_rect_growth_step > 0.0, "in_row.side_rect_growth_step > 0");
  require(cfg.in_row.side_rect_point_threshold >= 1, "in_row.side_rect_point_threshold >= 1");
  require(cfg.in_row.lookahead > 0.0, "in_row.lookahead > 0");
  require(cfg.in_row.exit_distance > 0.0, "in_row.exit_distance > 0");
  require(cfg.turn.turn_angle > 0.0 && cfg.turn.turn_angle <= M_PI,
          "turn.turn_angle in (0, pi]");
  require(cfg.turn.omega_turn > 0.0, "turn.omega_turn > 0");
  require(cfg.end_row.cluster_tolerance > 0.0, "end_row.cluster_tolerance > 0");
  require(cfg.end_row.min_cluster_size >= 1, "end_row.min_cluster_size >= 1");
  require(cfg.end_row.ransac_iterations >= 1, "end_row.ransac_iterations >= 1");
  require(cfg.end_row.ransac_threshold > 0.0, "end_row.ransac_threshold > 0");
  require(cfg.end_row.rows_to_skip >= 1, "end_row.rows_to_skip >= 1");
  require(cfg.corridors_to_traverse >= 1, "corridors_to_traverse >= 1");
  require(cfg.corridors_to_traverse <= cfg.world.n_rows - 1,
          "corridors_to_traverse <= world.n_rows - 1");
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

void apply_seed_override(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.world.seed = splitmix64(seed ^ 1);
  cfg.end_row.rng_seed = static_cast<std::uint32_t>(splitmix64(seed ^ 2));
}

std::string config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["corridors_to_traverse"] = cfg.corridors_to_traverse;
  j["log_scans"] = cfg.log_scans;
  j["world"] = {{"n_rows", cfg.world.n_rows},
                {"row_length", cfg.world.row_length},
                {"row_spacing", cfg.world.row_spacing},
                {"pole_spacing", cfg.world.pole_spacing},
                {"pole_radius", cfg.world.pole_radius},
                {"vegetative_stage", stage_name(cfg.world.vegetative_stage)},
                {"vegetation_density", cfg.world.vegetation_density},
                {"vegetation_protrusion_sigma", cfg.world.vegetation_protrusion_sigma},
                {"vegetation_clump_spacing", cfg.world.vegetation_clump_spacing},
                {"seed", cfg.world.seed}};
  j["sensor"] = {{"rate_hz", cfg.sensor.rate_hz},
                 {"beams", cfg.sensor.beams},
                 {"max_range", cfg.sensor.max_range},
                 {"min_range", cfg.sensor.min_range},
                 {"range_noise_sigma", cfg.sensor.range_noise_sigma},
                 {"dropout_probability", cfg.sensor.dropout_probability}};
  j["dynamics"] = {{"odom_rate_hz", cfg.dynamics.odom_rate_hz},
                   {"slip_factor", cfg.dynamics.slip_factor},
                   {"v_limit", cfg.dynamics.v_limit},
                   {"omega_limit", cfg.dynamics.omega_limit},
                   {"footprint_radius", cfg.dynamics.footprint_radius}};
  j["kinematics"] = {{"alpha", cfg.kinematics.alpha}, {"x_icr", cfg.kinematics.x_icr}};
  j["filter"] = {{"min_range", cfg.filter.min_range},
                 {"max_range", cfg.filter.max_range},
                 {"downsample_keep_every", cfg.filter.downsample_keep_every},
                 {"outlier_radius", cfg.filter.outlier_radius},
                 {"outlier_min_neighbors", cfg.filter.outlier_min_neighbors}};
  j["in_row"] = {{"cone_length", cfg.in_row.cone_length},
                 {"cone_angle_step", cfg.in_row.cone_angle_step},
                 {"cone_max_half_angle", cfg.in_row.cone_max_half_angle},
                 {"cone_point_threshold", cfg.in_row.cone_point_threshold},
                 {"side_rect_length", cfg.in_row.side_rect_length},
                 {"side_rect_growth_step", cfg.in_row.side_rect_growth_step},
                 {"side_rect_max_width", cfg.in_row.side_rect_max_width},
                 {"side_rect_point_threshold", cfg.in_row.side_rect_point_threshold},
                 {"center_gain", cfg.in_row.center_gain},
                 {"lookahead", cfg.in_row.lookahead},
                 {"pid_kp", cfg.in_row.pid.kp},
                 {"pid_ki", cfg.in_row.pid.ki},
                 {"pid_kd", cfg.in_row.pid.kd},
                 {"pid_integral_limit", cfg.in_row.pid_integral_limit},
                 {"v_max", cfg.in_row.v_max},
                 {"governor_length", cfg.in_row.governor_length},
                 {"governor_width", cfg.in_row.governor_width},
                 {"governor_stop_distance", cfg.in_row.governor_stop_distance},
                 {"end_rect_length", cfg.in_row.end_rect_length},
                 {"end_rect_width", cfg.in_row.end_rect_width},
                 {"end_point_threshold", cfg.in_row.end_point_threshold},
                 {"exit_distance", cfg.in_row.exit_distance}};
  j["turn"] = {{"turn_angle", cfg.turn.turn_angle},
               {"direction_first",
                cfg.turn.direction_first == TurnDirection::Left ? "left" : "right"},
               {"omega_turn", cfg.turn.omega_turn},
               {"alignment_tolerance", cfg.turn.alignment_tolerance}};
  j["end_row"] = {{"cluster_tolerance", cfg.end_row.cluster_tolerance},
                  {"min_cluster_size", cfg.end_row.min_cluster_size},
                  {"neighborhood_radius", cfg.end_row.neighborhood_radius},
                  {"neighborhood_min_points", cfg.end_row.neighborhood_min_points},
                  {"ransac_iterations", cfg.end_row.ransac_iterations},
                  {"ransac_threshold", cfg.end_row.ransac_threshold},
                  {"rng_seed", cfg.end_row.rng_seed},
                  {"policy", policy_name(cfg.end_row.policy)},
                  {"follow_distance", cfg.end_row.follow_distance},
                  {"rows_to_skip", cfg.end_row.rows_to_skip},
                  {"corridor_spacing", cfg.end_row.corridor_spacing},
                  {"heading_gain", cfg.end_row.heading_gain},
                  {"lateral_gain", cfg.end_row.lateral_gain},
                  {"cruise_speed", cfg.end_row.cruise_speed}};
  j["navigator"] = {{"degraded_timeout_s", cfg.navigator.degraded_timeout_s},
                    {"stall_timeout_s", cfg.navigator.stall_timeout_s}};
  return j.dump(1) + "\n";
}

}  // namespace vinenav
