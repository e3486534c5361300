// End-to-end checks of the vinenav binary: subcommands, exit codes and
// byte-identical reruns.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "ok  " : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run_cmd(const std::string& args) {
  const std::string cmd = std::string(VINENAV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "vinenav_cli_tests";
  fs::remove_all(work);
  fs::create_directories(work);

  const fs::path cfg_path = work / "config.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"corridors_to_traverse": 1,
               "world": {"n_rows": 2, "row_length": 10.0, "pole_spacing": 5.0},
               "sensor": {"range_noise_sigma": 0.005}})";
  }

  // generate: determinism across invocations.
  check(run_cmd("generate -c " + cfg_path.string() + " -o " + (work / "g1").string()) == 0,
        "generate exits 0");
  check(run_cmd("generate -c " + cfg_path.string() + " -o " + (work / "g2").string()) == 0,
        "generate twice exits 0");
  check(slurp(work / "g1/world.json") == slurp(work / "g2/world.json"),
        "world files byte-identical");
  check(!slurp(work / "g1/world.json").empty(), "world file non-empty");

  // run: same seed twice, byte-identical outputs.
  const std::string run1 = (work / "r1").string();
  const std::string run2 = (work / "r2").string();
  check(run_cmd("run -c " + cfg_path.string() + " --seed 5 --scan-log --svg -o " + run1) == 0,
        "run exits 0");
  check(run_cmd("run -c " + cfg_path.string() + " --seed 5 --scan-log -o " + run2) == 0,
        "run twice exits 0");
  for (const char* f : {"world.json", "trajectory.csv", "in_row.csv", "end_row.csv",
                        "commands.csv", "metrics.json", "scans.jsonl", "run_meta.json"})
    check(slurp(work / "r1" / f) == slurp(work / "r2" / f),
          std::string("byte-identical: ") + f);
  check(fs::exists(work / "r1/trajectory.svg"), "svg written when asked");

  // replay: commands must match the original run byte for byte.
  const std::string rep = (work / "rep").string();
  check(run_cmd("replay -c " + cfg_path.string() + " --seed 5 -o " + rep + " " +
                (work / "r1/scans.jsonl").string()) == 0,
        "replay exits 0");
  check(slurp(work / "rep/commands.csv") == slurp(work / "r1/commands.csv"),
        "replayed command log identical to the run");

  // replay of a truncated log stops cleanly.
  {
    std::ifstream in(work / "r1/scans.jsonl");
    std::ofstream out(work / "scans_cut.jsonl", std::ios::binary);
    std::string line;
    for (int i = 0; i < 10 && std::getline(in, line); ++i) out << line << "\n";
  }
  check(run_cmd("replay -c " + cfg_path.string() + " -o " + (work / "rep_cut").string() + " " +
                (work / "scans_cut.jsonl").string()) == 0,
        "truncated replay exits 0");

  // eval on the run directory.
  check(run_cmd("eval " + run1) == 0, "eval exits 0");
  check(!slurp(work / "r1/metrics.json").empty(), "metrics written");

  // config errors exit with 2.
  {
    std::ofstream bad(work / "bad.json");
    bad << R"({"world": {"n_rows": 1}})";
  }
  check(run_cmd("run -c " + (work / "bad.json").string()) == 2, "invalid config exits 2");
  {
    std::ofstream bad(work / "typo.json");
    bad << R"({"sead": 3})";
  }
  check(run_cmd("generate -c " + (work / "typo.json").string()) == 2, "unknown field exits 2");
  check(run_cmd("eval " + (work / "missing_dir").string()) == 1, "missing input exits nonzero");

  std::printf("%s (%d failures)\n", failures ? "CLI TESTS FAILED" : "CLI TESTS PASSED",
              failures);
  return failures ? 1 : 0;
}
