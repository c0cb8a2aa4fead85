#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "orbitsched/core_model.hpp"

#ifndef CLI_BINARY_PATH
#error "CLI_BINARY_PATH must point at the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code{-1};
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CLI_BINARY_PATH + "\" " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) res.output += buf;
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("orbitsched_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) { return orbitsched::read_file(p.string()); }

// Benchmark CSV with the wall-time column blanked, for byte comparisons.
std::string strip_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string col;
    while (std::getline(ls, col, ',')) cols.push_back(col);
    if (cols.size() == 7) cols[5] = "_";
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("generate is deterministic per seed and writes both files") {
  const fs::path a = fresh_dir("gen_a");
  const fs::path b = fresh_dir("gen_b");
  CHECK(run_cli("generate --sats 1 --requests 12 --seed 5 --out " + a.string()).exit_code == 0);
  CHECK(run_cli("generate --sats 1 --requests 12 --seed 5 --out " + b.string()).exit_code == 0);
  CHECK(slurp(a / "ephemeris.json") == slurp(b / "ephemeris.json"));
  CHECK(slurp(a / "requests.json") == slurp(b / "requests.json"));
  // Different seed changes the requests.
  const fs::path c = fresh_dir("gen_c");
  CHECK(run_cli("generate --sats 1 --requests 12 --seed 6 --out " + c.string()).exit_code == 0);
  CHECK(slurp(a / "requests.json") != slurp(c / "requests.json"));
}

TEST_CASE("plan prints the completion table and writes plan.json") {
  const fs::path dir = fresh_dir("plan");
  REQUIRE(run_cli("generate --requests 15 --seed 9 --out " + dir.string()).exit_code == 0);
  const fs::path map = dir / "map.svg";
  const fs::path gantt = dir / "gantt.svg";
  const RunResult res = run_cli("plan --planner greedy --cluster dto-bunch --out " + dir.string() +
                                " --svg-map " + map.string() + " --svg-gantt " + gantt.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("priority,total,completed,rate") != std::string::npos);
  CHECK(res.output.find("pi1,") != std::string::npos);
  CHECK(res.output.find("pi4,") != std::string::npos);
  CHECK(fs::exists(dir / "plan.json"));
  // The written plan parses and covers what the table claims.
  const auto plan = orbitsched::parse_plan_text(slurp(dir / "plan.json"));
  CHECK(plan.size() >= 1);
  // SVG side outputs.
  CHECK(slurp(map).rfind("<svg", 0) == 0);
  CHECK(slurp(gantt).rfind("<svg", 0) == 0);
}

TEST_CASE("usage errors exit with status 2") {
  const fs::path dir = fresh_dir("err");
  CHECK(run_cli("generate --sats 0 --requests 5 --out " + dir.string()).exit_code == 2);
  CHECK(run_cli("plan --planner nope --out " + dir.string()).exit_code == 2);
  CHECK(run_cli("plan --cluster nope --planner greedy --out " + dir.string()).exit_code == 2);
  CHECK(run_cli("plan --planner greedy --out " + (dir / "missing").string()).exit_code == 2);
  CHECK(run_cli("benchmark --requests 5").exit_code == 2);  // empty planner list
  CHECK(run_cli("--definitely-not-a-flag").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("benchmark emits the CSV table deterministically") {
  const fs::path out_csv = fresh_dir("bench") / "bench.csv";
  const std::string args = "benchmark --requests 20 --seed 4 --planner greedy --planner qubo "
                           "--cluster dto-bunch --out " + out_csv.string();
  const RunResult a = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output.rfind("planner,pi1_rate,pi2_rate,pi3_rate,pi4_rate,wall_time_s,valid\n", 0) == 0);
  CHECK(a.output.find("\ngreedy,") != std::string::npos);
  CHECK(a.output.find("\nqubo,") != std::string::npos);
  CHECK(a.output.find(",ok\n") != std::string::npos);
  CHECK(slurp(out_csv) == a.output);

  // Re-running reproduces every byte except the wall-clock column.
  const RunResult b = run_cli(args);
  CHECK(b.exit_code == 0);
  CHECK(strip_wall_time(a.output) == strip_wall_time(b.output));
}

TEST_CASE("config file seeds flags and explicit flags override it") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path cfg = dir / "config.json";
  {
    std::ofstream f(cfg);
    f << R"({"requests": 7, "seed": 11, "out": ")" << dir.string() << R"("})" << "\n";
  }
  CHECK(run_cli("generate --config " + cfg.string()).exit_code == 0);
  CHECK(orbitsched::parse_requests((dir / "requests.json").string()).size() == 7);

  // --requests on the command line wins over the config value.
  CHECK(run_cli("generate --config " + cfg.string() + " --requests 4").exit_code == 0);
  CHECK(orbitsched::parse_requests((dir / "requests.json").string()).size() == 4);

  // Broken config is a usage error.
  const fs::path bad = dir / "bad.json";
  { std::ofstream f(bad); f << "{nope"; }
  CHECK(run_cli("generate --config " + bad.string()).exit_code == 2);
}
