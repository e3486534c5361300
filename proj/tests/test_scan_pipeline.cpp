#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vinenav/scan.hpp"

using namespace vinenav;

TEST_CASE("to_points maps polar beams and drops no-returns") {
  RawScan raw;
  raw.timestamp = 1.5;
  raw.beams = {{0.0, 2.0}, {M_PI / 2.0, 1.0}, {1.0, kNoReturn}};
  const Scan2D scan = to_points(raw);
  CHECK(scan.timestamp == doctest::Approx(1.5));
  REQUIRE(scan.points.size() == 2);
  CHECK(scan.points[0].x == doctest::Approx(2.0));
  CHECK(scan.points[0].y == doctest::Approx(0.0));
  CHECK(scan.points[1].x == doctest::Approx(0.0));
  CHECK(scan.points[1].y == doctest::Approx(1.0));
}

TEST_CASE("radius_filter keeps the closed band") {
  Scan2D scan;
  scan.points = {{0.5, 0.0}, {3.0, 0.0}, {25.0, 0.0}};
  const Scan2D out = radius_filter(scan, 0.8, 20.0);
  REQUIRE(out.points.size() == 1);
  CHECK(out.points[0].x == doctest::Approx(3.0));

  const Scan2D empty = radius_filter(Scan2D{}, 0.8, 20.0);
  CHECK(empty.points.empty());

  Scan2D boundary;
  boundary.points = {{0.8, 0.0}};
  CHECK(radius_filter(boundary, 0.8, 20.0).points.size() == 1);
}

TEST_CASE("radius_filter is idempotent") {
  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Scan2D scan = oracle::random_scan(rng, 200, 30.0);
    const Scan2D once = radius_filter(scan, 0.8, 20.0);
    const Scan2D twice = radius_filter(once, 0.8, 20.0);
    REQUIRE(once.points.size() == twice.points.size());
    for (std::size_t k = 0; k < once.points.size(); ++k)
      CHECK(distance(once.points[k], twice.points[k]) == 0.0);
  }
}

TEST_CASE("downsample strides indices") {
  Scan2D scan;
  for (int i = 0; i < 10; ++i) scan.points.push_back({double(i), 0.0});
  CHECK(downsample(scan, 1).points.size() == 10);
  const Scan2D every3 = downsample(scan, 3);
  REQUIRE(every3.points.size() == 4);
  CHECK(every3.points[1].x == doctest::Approx(3.0));
  CHECK(every3.points[3].x == doctest::Approx(9.0));
  CHECK(downsample(Scan2D{}, 3).points.empty());
}

TEST_CASE("outlier_filter examples") {
  Scan2D cluster;
  for (int i = 0; i < 5; ++i) cluster.points.push_back({0.01 * i, 0.0});
  CHECK(outlier_filter(cluster, 0.1, 2).points.size() == 5);

  Scan2D with_lone = cluster;
  with_lone.points.push_back({5.0, 0.0});
  const Scan2D out = outlier_filter(with_lone, 0.1, 2);
  CHECK(out.points.size() == 5);
  for (const Point2& p : out.points) CHECK(norm(p) < 1.0);

  CHECK(outlier_filter(with_lone, 0.1, 0).points.size() == 6);  // vacuous
}

TEST_CASE("outlier_filter agrees with the O(n^2) count") {
  std::mt19937 rng(17);
  for (int i = 0; i < 300; ++i) {
    const Scan2D scan = oracle::random_scan(rng, 500, 3.0);
    const Scan2D fast = outlier_filter(scan, 0.3, 2);
    const auto brute = oracle::outlier_filter(scan.points, 0.3, 2);
    REQUIRE(fast.points.size() == brute.size());
    for (std::size_t k = 0; k < brute.size(); ++k)
      CHECK(distance(fast.points[k], brute[k]) == 0.0);
  }
}

TEST_CASE("pipeline output is a subset of its input") {
  std::mt19937 rng(29);
  FilterConfig cfg;
  for (int i = 0; i < 50; ++i) {
    RawScan raw;
    std::uniform_real_distribution<double> range(0.0, 30.0);
    for (int k = 0; k < 256; ++k)
      raw.beams.push_back({-M_PI + 2.0 * M_PI * k / 256, range(rng)});
    const Scan2D all = to_points(raw);
    const Scan2D filtered = apply_filters(raw, cfg);
    for (const Point2& p : filtered.points) {
      bool found = false;
      for (const Point2& q : all.points)
        if (p.x == q.x && p.y == q.y) { found = true; break; }
      CHECK(found);
    }
  }
}

TEST_CASE("scan log round trip is bit-exact at 6 decimals") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  Scan2D scan;
  scan.timestamp = 12.3;
  for (int i = 0; i < 200; ++i) scan.points.push_back({coord(rng), coord(rng)});
  scan = quantize(scan);

  std::ostringstream first;
  write_scan_line(first, scan);

  Scan2D parsed;
  REQUIRE(read_scan_line(first.str(), parsed));
  REQUIRE(parsed.points.size() == scan.points.size());

  std::ostringstream second;
  write_scan_line(second, parsed);
  CHECK(first.str() == second.str());
  for (std::size_t i = 0; i < scan.points.size(); ++i)
    CHECK(distance(parsed.points[i], scan.points[i]) == 0.0);
}
