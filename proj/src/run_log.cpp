#include "vinenav/run_log.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vinenav {

Phase phase_from_name(const std::string& name) {
  for (Phase p : {Phase::InRow, Phase::ExitStraight, Phase::TurnOut, Phase::AlignHeadland,
                  Phase::EndRow, Phase::TurnIn, Phase::Done, Phase::Fault})
    if (name == phase_name(p)) return p;
  throw std::invalid_argument("unknown phase: " + name);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + path);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

}  // namespace

void write_run_log(const std::string& dir, const RunLog& log) {
  std::filesystem::create_directories(dir);
  char buf[256];

  {
    auto out = open_out(dir + "/trajectory.csv");
    out << "t,x,y,heading,odo_x,odo_y,odo_heading,phase,corridor\n";
    for (const auto& s : log.trajectory) {
      std::snprintf(buf, sizeof(buf), "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%s,%d\n", s.t,
                    s.truth.position.x, s.truth.position.y, s.truth.heading,
                    s.odom.position.x, s.odom.position.y, s.odom.heading,
                    phase_name(s.phase), s.corridor);
      out << buf;
    }
  }
  {
    auto out = open_out(dir + "/in_row.csv");
    out << "t,x,y,heading,left,right,left_half,right_half,offset,v,omega,row_ended,corridor\n";
    for (const auto& r : log.in_row) {
      std::snprintf(buf, sizeof(buf),
                    "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d\n", r.t,
                    r.pose.position.x, r.pose.position.y, r.pose.heading, r.left, r.right,
                    r.left_half, r.right_half, r.offset, r.v, r.omega, r.row_ended ? 1 : 0,
                    r.corridor);
      out << buf;
    }
  }
  {
    auto out = open_out(dir + "/end_row.csv");
    out << "t,clusters,passed,seg_ax,seg_ay,seg_bx,seg_by,endpoints\n";
    for (const auto& r : log.end_row) {
      const Segment2 seg = r.segment.value_or(Segment2{{0, 0}, {0, 0}});
      std::snprintf(buf, sizeof(buf), "%.3f,%d,%d,%.6f,%.6f,%.6f,%.6f,", r.t, r.cluster_count,
                    r.passed, seg.a.x, seg.a.y, seg.b.x, seg.b.y);
      out << buf;
      for (std::size_t i = 0; i < r.endpoints.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%s:%.6f:%.6f", i ? ";" : "",
                      policy_name(r.endpoints[i].policy), r.endpoints[i].world.x,
                      r.endpoints[i].world.y);
        out << buf;
      }
      out << "\n";
    }
  }
  {
    auto out = open_out(dir + "/events.csv");
    out << "t,label,detail\n";
    for (const auto& e : log.events) {
      std::snprintf(buf, sizeof(buf), "%.3f,%s,%s\n", e.t, e.label.c_str(), e.detail.c_str());
      out << buf;
    }
  }
  write_commands_csv(dir + "/commands.csv", log.commands);
}

void write_commands_csv(const std::string& path, const std::vector<CommandRecord>& commands) {
  auto out = open_out(path);
  out << "tick,t,v,omega\n";
  char buf[128];
  for (const auto& c : commands) {
    std::snprintf(buf, sizeof(buf), "%ld,%.3f,%.9f,%.9f\n", c.tick, c.t, c.v, c.omega);
    out << buf;
  }
}

RunLog load_run_log(const std::string& dir) {
  RunLog log;
  std::string line;

  {
    std::ifstream in(dir + "/trajectory.csv");
    if (!in) throw std::runtime_error("cannot open " + dir + "/trajectory.csv");
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split(line, ',');
      if (f.size() != 9) throw std::runtime_error("bad trajectory row: " + line);
      TrajectorySample s;
      s.t = std::stod(f[0]);
      s.truth.position = {std::stod(f[1]), std::stod(f[2])};
      s.truth.heading = std::stod(f[3]);
      s.odom.position = {std::stod(f[4]), std::stod(f[5])};
      s.odom.heading = std::stod(f[6]);
      s.phase = phase_from_name(f[7]);
      s.corridor = std::stoi(f[8]);
      log.trajectory.push_back(s);
    }
  }
  {
    std::ifstream in(dir + "/in_row.csv");
    if (!in) throw std::runtime_error("cannot open " + dir + "/in_row.csv");
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split(line, ',');
      if (f.size() != 13) throw std::runtime_error("bad in_row row: " + line);
      InRowRecord r;
      r.t = std::stod(f[0]);
      r.pose.position = {std::stod(f[1]), std::stod(f[2])};
      r.pose.heading = std::stod(f[3]);
      r.left = std::stod(f[4]);
      r.right = std::stod(f[5]);
      r.left_half = std::stod(f[6]);
      r.right_half = std::stod(f[7]);
      r.offset = std::stod(f[8]);
      r.v = std::stod(f[9]);
      r.omega = std::stod(f[10]);
      r.row_ended = f[11] == "1";
      r.corridor = std::stoi(f[12]);
      log.in_row.push_back(r);
    }
  }
  {
    std::ifstream in(dir + "/end_row.csv");
    if (!in) throw std::runtime_error("cannot open " + dir + "/end_row.csv");
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split(line, ',');
      if (f.size() < 7) throw std::runtime_error("bad end_row row: " + line);
      EndRowRecord r;
      r.t = std::stod(f[0]);
      r.cluster_count = std::stoi(f[1]);
      r.passed = std::stoi(f[2]);
      const Segment2 seg{{std::stod(f[3]), std::stod(f[4])},
                         {std::stod(f[5]), std::stod(f[6])}};
      if (!(seg.a.x == 0.0 && seg.a.y == 0.0 && seg.b.x == 0.0 && seg.b.y == 0.0))
        r.segment = seg;
      if (f.size() >= 8 && !f[7].empty()) {
        for (const auto& ep : split(f[7], ';')) {
          const auto parts = split(ep, ':');
          if (parts.size() != 3) throw std::runtime_error("bad endpoint field: " + ep);
          r.endpoints.push_back(
              {{std::stod(parts[1]), std::stod(parts[2])}, policy_from_name(parts[0])});
        }
      }
      log.end_row.push_back(r);
    }
  }
  {
    std::ifstream in(dir + "/events.csv");
    if (in) {
      std::getline(in, line);
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() < 3) continue;
        log.events.push_back({std::stod(f[0]), f[1], f[2]});
      }
    }
  }
  return log;
}

void write_trajectory_svg(const std::string& path, const RunLog& log, const World& world) {
  const double margin = 3.0;
  const double span_x = world.config.row_length + 2.0 * margin + 4.0;
  const double span_y = world.config.row_spacing * (world.config.n_rows - 1) + 2.0 * margin;
  const double scale = 20.0;
  auto sx = [&](double x) { return (x + margin + 2.0) * scale; };
  auto sy = [&](double y) { return (span_y - (y + margin)) * scale; };

  auto out = open_out(path);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n",
                span_x * scale, span_y * scale);
  out << buf << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& row : world.pole_centers) {
    for (const Point2& p : row) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"saddlebrown\"/>\n",
                    sx(p.x), sy(p.y));
      out << buf;
    }
  }
  for (const CircleObstacle& o : world.obstacles) {
    if (o.radius > 0.03) continue;  // vegetation only; poles drawn above
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"1\" fill=\"seagreen\"/>\n",
                  sx(o.center.x), sy(o.center.y));
    out << buf;
  }
  // Corridor center lines.
  for (int c = 0; c + 1 < world.config.n_rows; ++c) {
    const double y = (c + 0.5) * world.config.row_spacing;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"lightgray\" stroke-dasharray=\"4\"/>\n",
                  sx(0.0), sy(y), sx(world.config.row_length), sy(y));
    out << buf;
  }
  out << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" points=\"";
  for (const auto& s : log.trajectory) {
    std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", sx(s.truth.position.x),
                  sy(s.truth.position.y));
    out << buf;
  }
  out << "\"/>\n</svg>\n";
}

}  // namespace vinenav
