#include "vinenav/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace vinenav {

namespace {

constexpr double kMaxSimTime = 600.0;

// The sensor pose and the robot pose coincide (center-mounted sensor).
Pose2 start_pose(const RunConfig& cfg) {
  Pose2 pose;
  pose.position = {-1.0, cfg.world.row_spacing / 2.0};
  pose.heading = -M_PI / 2.0;  // body-forward along +x, into corridor 0
  return pose;
}

}  // namespace

RunOutcome run_simulation(const RunConfig& cfg, std::optional<std::string> scan_log_path) {
  RunOutcome out;
  out.world = generate_world(cfg.world);
  Raycaster raycaster(out.world);
  std::mt19937_64 sensor_rng(cfg.seed);

  Navigator nav(cfg.navigator, cfg.in_row, cfg.turn, cfg.end_row);
  Pose2 truth = start_pose(cfg);

  std::ofstream scan_log;
  if (scan_log_path) {
    scan_log.open(*scan_log_path, std::ios::binary);
    if (!scan_log) throw std::runtime_error("cannot write scan log: " + *scan_log_path);
  }

  const double dt = 1.0 / cfg.dynamics.odom_rate_hz;
  const int scan_every =
      std::max(1, static_cast<int>(std::lround(cfg.dynamics.odom_rate_hz / cfg.sensor.rate_hz)));
  const long max_ticks = static_cast<long>(kMaxSimTime / dt);

  Twist odom_twist;  // measured over the previous tick

  for (long tick = 0; tick < max_ticks; ++tick) {
    const double t = tick * dt;

    std::optional<Scan2D> scan;
    if (tick % scan_every == 0) {
      RawScan raw = raycaster.scan(truth, cfg.sensor, sensor_rng);
      raw.timestamp = t;
      // Quantized to the scan-log precision so a replayed log reproduces
      // this run bit for bit.
      scan = quantize(apply_filters(raw, cfg.filter));
      scan->timestamp = t;
      if (scan_log.is_open()) write_scan_line(scan_log, *scan);
    }

    const Twist cmd = nav.step(scan, odom_twist, dt);
    const Pose2 odom_pose = nav.pose();

    // Actuate: commanded twist -> treads -> ground truth with slip; the
    // encoders measure the clamped treads, blind to slip.
    const TreadSpeeds treads =
        twist_to_treads(clamp_twist(cmd, cfg.dynamics), cfg.kinematics);
    truth = step_dynamics(truth, treads, cfg.dynamics, cfg.kinematics, dt);
    odom_twist = tread_to_twist(treads, cfg.kinematics);

    out.log.commands.push_back({tick, t, cmd.v_y, cmd.omega_z});
    out.log.trajectory.push_back({t, truth, odom_pose, nav.phase(), nav.corridor_index()});

    if (raycaster.collides(truth.position, cfg.dynamics.footprint_radius)) {
      ++out.log.collisions;
      out.log.events.push_back({t, "collision", "footprint overlaps an obstacle"});
    }

    if (scan) {
      if (const auto& st = nav.last_in_row_status()) {
        out.log.in_row.push_back({t, odom_pose, st->left_distance, st->right_distance,
                                  st->cone.left_half_angle, st->cone.right_half_angle,
                                  st->steering_offset, st->commanded.v_y,
                                  st->commanded.omega_z, st->row_ended,
                                  nav.corridor_index()});
      }
      if (const auto& er = nav.last_end_row_result()) {
        // Log both end-point policies against the ground-truth sensor pose
        // so the detection error can be evaluated per policy offline.
        EndRowRecord rec;
        rec.t = t;
        rec.cluster_count = er->cluster_count;
        rec.passed = er->passed_count;
        if (er->segment) {
          rec.segment = Segment2{transform_from_frame(er->segment->a, truth),
                                 transform_from_frame(er->segment->b, truth)};
        }
        const auto clusters =
            euclidean_cluster(*scan, cfg.end_row.cluster_tolerance, cfg.end_row.min_cluster_size);
        for (const Cluster& c : clusters) {
          EndRowConfig policy_cfg = cfg.end_row;
          policy_cfg.policy = EndPointPolicy::Nearest;
          if (auto ep = pick_end_point(c, {0.0, 0.0}, policy_cfg))
            rec.endpoints.push_back(
                {transform_from_frame(ep->position, truth), EndPointPolicy::Nearest});
          policy_cfg.policy = EndPointPolicy::LineFitting;
          if (auto ep = pick_end_point(c, {0.0, 0.0}, policy_cfg))
            rec.endpoints.push_back(
                {transform_from_frame(ep->position, truth), EndPointPolicy::LineFitting});
        }
        out.log.end_row.push_back(std::move(rec));
      }
    }

    for (NavEvent& e : nav.drain_events())
      out.log.events.push_back({e.t, e.label, e.detail});

    out.sim_time = t;
    if (nav.phase() == Phase::Done || nav.phase() == Phase::Fault) break;
  }

  out.final_phase = nav.phase();
  out.fault_reason = nav.fault_reason();
  out.completed = nav.phase() == Phase::Done;
  if (nav.phase() != Phase::Done && nav.phase() != Phase::Fault)
    out.log.events.push_back({out.sim_time, "timeout", "simulation time cap reached"});
  out.log.completed = out.completed;
  out.log.final_phase = phase_name(out.final_phase);
  switch (out.fault_reason) {
    case FaultReason::DegradedPerception: out.log.fault_reason = "degraded_perception"; break;
    case FaultReason::Stalled: out.log.fault_reason = "stalled"; break;
    default: break;
  }
  return out;
}

void write_run_outputs(const std::string& dir, const RunConfig& cfg, const RunOutcome& run,
                       bool write_svg) {
  std::filesystem::create_directories(dir);
  write_world(dir + "/world.json", run.world);
  {
    std::ofstream meta(dir + "/run_meta.json", std::ios::binary);
    if (!meta) throw std::runtime_error("cannot write run_meta.json");
    meta << config_json(cfg);
  }
  write_run_log(dir, run.log);
  const MetricsReport report = compute_metrics(run.log, run.world);
  write_metrics_json(dir + "/metrics.json", report);
  if (write_svg) write_trajectory_svg(dir + "/trajectory.svg", run.log, run.world);
}

std::vector<CommandRecord> replay_scan_log(const std::vector<Scan2D>& scans,
                                           const RunConfig& cfg) {
  Navigator nav(cfg.navigator, cfg.in_row, cfg.turn, cfg.end_row);
  const double dt = 1.0 / cfg.dynamics.odom_rate_hz;
  const int scan_every =
      std::max(1, static_cast<int>(std::lround(cfg.dynamics.odom_rate_hz / cfg.sensor.rate_hz)));

  std::vector<CommandRecord> commands;
  Twist odom_twist;
  long tick = 0;
  for (const Scan2D& scan : scans) {
    for (int sub = 0; sub < scan_every; ++sub, ++tick) {
      const double t = tick * dt;
      const std::optional<Scan2D> maybe = sub == 0 ? std::optional<Scan2D>(scan) : std::nullopt;
      const Twist cmd = nav.step(maybe, odom_twist, dt);
      // Identical odometry reconstruction as the live run: through the
      // tread clamp and back.
      const TreadSpeeds treads =
          twist_to_treads(clamp_twist(cmd, cfg.dynamics), cfg.kinematics);
      odom_twist = tread_to_twist(treads, cfg.kinematics);
      commands.push_back({tick, t, cmd.v_y, cmd.omega_z});
      if (nav.phase() == Phase::Done || nav.phase() == Phase::Fault) return commands;
    }
  }
  return commands;
}

}  // namespace vinenav
