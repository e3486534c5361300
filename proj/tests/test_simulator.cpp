#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "vinenav/odometry.hpp"
#include "vinenav/simulator.hpp"

using namespace vinenav;

TEST_CASE("generate_world pole layout") {
  WorldConfig cfg;
  cfg.n_rows = 2;
  cfg.row_length = 36.0;
  cfg.pole_spacing = 6.0;
  const World world = generate_world(cfg);
  REQUIRE(world.pole_centers.size() == 2);
  for (const auto& row : world.pole_centers) {
    REQUIRE(row.size() == 7);
    CHECK(row.front().x == doctest::Approx(0.0));
    CHECK(row.back().x == doctest::Approx(36.0));
  }
  CHECK(world.pole_centers[1][0].y == doctest::Approx(cfg.row_spacing));
}

TEST_CASE("generate_world is deterministic and scales with the stage") {
  WorldConfig cfg;
  const World a = generate_world(cfg);
  const World b = generate_world(cfg);
  REQUIRE(a.obstacles.size() == b.obstacles.size());
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    CHECK(a.obstacles[i].center.x == b.obstacles[i].center.x);
    CHECK(a.obstacles[i].center.y == b.obstacles[i].center.y);
  }

  WorldConfig low = cfg, high = cfg;
  low.vegetative_stage = VegetativeStage::Low;
  high.vegetative_stage = VegetativeStage::High;
  CHECK(generate_world(high).obstacles.size() > generate_world(low).obstacles.size());
}

TEST_CASE("generate_world validates the config") {
  WorldConfig cfg;
  cfg.n_rows = 1;
  CHECK_THROWS(generate_world(cfg));
}

TEST_CASE("world file round trip") {
  WorldConfig cfg;
  cfg.n_rows = 2;
  cfg.row_length = 12.0;
  const World world = generate_world(cfg);
  const std::string path = "test_world_roundtrip.json";
  write_world(path, world);
  const World loaded = load_world(path);
  REQUIRE(loaded.obstacles.size() == world.obstacles.size());
  CHECK(loaded.config.row_length == world.config.row_length);
  REQUIRE(loaded.pole_centers.size() == world.pole_centers.size());
  for (std::size_t r = 0; r < world.pole_centers.size(); ++r)
    REQUIRE(loaded.pole_centers[r].size() == world.pole_centers[r].size());
  for (std::size_t i = 0; i < world.obstacles.size(); ++i)
    CHECK(distance(loaded.obstacles[i].center, world.obstacles[i].center) < 1e-12);
  std::filesystem::remove(path);
}

TEST_CASE("raycast hits a pole at the analytic distance") {
  World world;
  world.config.n_rows = 2;
  world.obstacles.push_back({{0.0, 5.0}, 0.05});
  world.pole_centers = {{}, {}};

  SensorConfig cfg;
  cfg.range_noise_sigma = 0.0;
  std::mt19937_64 rng(1);
  const Pose2 sensor{{0.0, 0.0}, 0.0};
  const RawScan raw = raycast_scan(world, sensor, cfg, rng);

  // The beam pointing along +y (sensor polar pi/2).
  const int k = cfg.beams * 3 / 4;
  CHECK(raw.beams[k].bearing == doctest::Approx(M_PI / 2.0));
  CHECK(raw.beams[k].range == doctest::Approx(4.95).epsilon(1e-6));

  // A beam pointing away sees nothing.
  CHECK(raw.beams[0].range == kNoReturn);
}

TEST_CASE("raycast honors the minimum scanning distance") {
  World world;
  world.config.n_rows = 2;
  world.obstacles.push_back({{0.0, 0.5}, 0.05});
  world.pole_centers = {{}, {}};
  SensorConfig cfg;
  cfg.range_noise_sigma = 0.0;
  std::mt19937_64 rng(1);
  const RawScan raw = raycast_scan(world, Pose2{}, cfg, rng);
  for (const Beam& b : raw.beams) CHECK(b.range == kNoReturn);
}

TEST_CASE("raycast on an empty world returns nothing") {
  World world;
  world.config.n_rows = 2;
  world.pole_centers = {{}, {}};
  SensorConfig cfg;
  std::mt19937_64 rng(7);
  const RawScan raw = raycast_scan(world, Pose2{}, cfg, rng);
  for (const Beam& b : raw.beams) CHECK(b.range == kNoReturn);
}

TEST_CASE("raycast is deterministic for a fixed rng state") {
  WorldConfig wc;
  wc.n_rows = 2;
  wc.row_length = 10.0;
  const World world = generate_world(wc);
  SensorConfig cfg;
  cfg.range_noise_sigma = 0.02;
  cfg.dropout_probability = 0.05;
  const Pose2 pose{{3.0, 1.0}, -M_PI / 2.0};

  std::mt19937_64 rng_a(99), rng_b(99);
  const RawScan a = raycast_scan(world, pose, cfg, rng_a);
  const RawScan b = raycast_scan(world, pose, cfg, rng_b);
  REQUIRE(a.beams.size() == b.beams.size());
  for (std::size_t i = 0; i < a.beams.size(); ++i) CHECK(a.beams[i].range == b.beams[i].range);
}

TEST_CASE("step_dynamics slip scales the true rotation") {
  DynamicsConfig dyn;
  dyn.slip_factor = 0.2;
  const KinematicParams kin;

  // Command an in-place rotation totalling 90 degrees of odometry.
  const Twist turn{0.0, 0.0, M_PI / 4.0};
  const TreadSpeeds treads = twist_to_treads(turn, kin);
  Pose2 truth;
  Pose2 odom;
  const double dt = 0.02;
  const int ticks = 100;  // 2 s at pi/4 rad/s
  for (int i = 0; i < ticks; ++i) {
    truth = step_dynamics(truth, treads, dyn, kin, dt);
    odom = integrate_pose(odom, tread_to_twist(treads, kin), dt);
  }
  CHECK(odom.heading == doctest::Approx(M_PI / 2.0).epsilon(1e-9));
  CHECK(truth.heading == doctest::Approx(0.8 * M_PI / 2.0).epsilon(1e-9));
}

TEST_CASE("step_dynamics clamps the speed") {
  DynamicsConfig dyn;  // v_limit 2
  const KinematicParams kin;
  const TreadSpeeds treads = twist_to_treads({0.0, 3.0, 0.0}, kin);
  const Pose2 after = step_dynamics(Pose2{}, treads, dyn, kin, 1.0);
  CHECK(norm(after.position) == doctest::Approx(2.0));
}

TEST_CASE("ground truth equals dead reckoning without slip") {
  DynamicsConfig dyn;
  dyn.slip_factor = 0.0;
  const KinematicParams kin{0.95, 0.45};
  Pose2 truth, odom;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> v(-1.5, 1.5);
  const double dt = 0.02;
  for (int i = 0; i < 5000; ++i) {  // 100 s
    if (i % 50 == 0) {  // change command every second
      const Twist cmd{0.0, v(rng), v(rng)};
      const TreadSpeeds treads = twist_to_treads(clamp_twist(cmd, dyn), kin);
      for (int k = 0; k < 50 && i + k < 5000; ++k) {
        truth = step_dynamics(truth, treads, dyn, kin, dt);
        odom = integrate_pose(odom, tread_to_twist(treads, kin), dt);
      }
      i += 49;
    }
  }
  CHECK(distance(truth.position, odom.position) < 1e-9);
  CHECK(std::abs(normalize_angle(truth.heading - odom.heading)) < 1e-9);
}

TEST_CASE("collision check sees nearby obstacles") {
  World world;
  world.config.n_rows = 2;
  world.obstacles.push_back({{1.0, 1.0}, 0.05});
  world.pole_centers = {{}, {}};
  const Raycaster rc(world);
  CHECK(rc.collides({1.2, 1.0}, 0.35));
  CHECK_FALSE(rc.collides({2.0, 1.0}, 0.35));
}
