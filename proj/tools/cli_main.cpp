// Command-line front end: dataset generation, planner runs, benchmarks, and
// SVG figure emission.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "orbitsched/chaining.hpp"
#include "orbitsched/clustering.hpp"
#include "orbitsched/core_model.hpp"
#include "orbitsched/planners.hpp"

namespace {

using orbitsched::AcquisitionRequest;
using orbitsched::Plan;
using orbitsched::ProblemInstance;

int g_log_level = 0;  // 0 error, 1 info, 2 debug

void init_logging() {
  const char* env = std::getenv("ORBIT_SCHED_LOG");
  if (env == nullptr) return;
  const std::string level = env;
  if (level == "info") g_log_level = 1;
  if (level == "debug") g_log_level = 2;
}

void log_info(const std::string& msg) {
  if (g_log_level >= 1) std::cerr << "[info] " << msg << "\n";
}

struct CommonFlags {
  int sats = 1;
  int requests = 100;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string planner = "greedy";
  std::string cluster = "none";
  int k = 0;
  std::int64_t step_s = 30;
  double time_limit = 10.0;
  std::string svg_map;
  std::string svg_gantt;
  int jobs = 1;
  std::vector<std::string> planners;  // benchmark
  int ppo_steps = 2000;
  int az_episodes = 8;
  int az_simulations = 16;
  double train_time_limit = 300.0;
  std::string config;  // handled by the pre-parse pass; registered so CLI11 accepts it
};

// --config JSON mirrors the long flag names; explicit flags win because they
// are parsed afterwards over these defaults.
bool apply_config_file(const std::string& path, CommonFlags& flags, std::string& error) {
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(orbitsched::read_file(path));
  } catch (const std::exception& e) {
    error = std::string("bad config file: ") + e.what();
    return false;
  }
  const auto get = [&config](const char* key, auto& slot) {
    if (config.contains(key)) slot = config.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("sats", flags.sats);
  get("requests", flags.requests);
  get("seed", flags.seed);
  get("out", flags.out);
  get("planner", flags.planner);
  get("cluster", flags.cluster);
  get("k", flags.k);
  get("step-s", flags.step_s);
  get("time-limit", flags.time_limit);
  get("svg-map", flags.svg_map);
  get("svg-gantt", flags.svg_gantt);
  get("jobs", flags.jobs);
  get("planners", flags.planners);
  get("ppo-steps", flags.ppo_steps);
  get("az-episodes", flags.az_episodes);
  get("az-simulations", flags.az_simulations);
  get("train-time-limit", flags.train_time_limit);
  return true;
}

ProblemInstance load_instance(const std::string& dir) {
  ProblemInstance instance;
  instance.satellites =
      orbitsched::parse_ephemeris((std::filesystem::path(dir) / "ephemeris.json").string());
  instance.requests =
      orbitsched::parse_requests((std::filesystem::path(dir) / "requests.json").string());
  return instance;
}

std::string completion_table(const Plan& plan) {
  std::ostringstream out;
  out << "priority,total,completed,rate\n";
  for (int p = 0; p < 4; ++p) {
    const auto& s = plan.stats[static_cast<std::size_t>(p)];
    out << "pi" << (p + 1) << "," << s.total << "," << s.completed << ","
        << (s.total == 0 ? 0.0 : 100.0 * s.rate()) << "\n";
  }
  return out.str();
}

std::string svg_map(const ProblemInstance& instance, const Plan& plan) {
  std::set<std::string> completed;
  for (const auto& [sat, acqs] : plan.satellites) {
    (void)sat;
    for (const auto& a : acqs) completed.insert(a.request_id);
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
         "viewBox=\"0 0 800 400\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& r : instance.requests) {
    const orbitsched::GeoPoint mid = orbitsched::request_midpoint(r);
    const double x = (mid.longitude_deg + 180.0) / 360.0 * 800.0;
    const double y = (90.0 - mid.latitude_deg) / 180.0 * 400.0;
    const bool done = r.completed || completed.count(r.request_id) > 0;
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.5\" fill=\""
        << (done ? "green" : "blue") << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_gantt(const Plan& plan) {
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (const auto& [sat, acqs] : plan.satellites) {
    (void)sat;
    for (const auto& a : acqs) {
      lo = std::min(lo, a.acquisition_start_ms - a.relay_duration_s_from_previous * 1000);
      hi = std::max(hi, a.acquisition_start_ms + a.acquisition_duration_ms);
    }
  }
  const int row_h = 40;
  const int width = 1000;
  const int height = std::max<int>(row_h, row_h * static_cast<int>(plan.satellites.size()));
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\" stroke=\"black\"/>\n";
  if (lo < hi) {
    const double span = static_cast<double>(hi - lo);
    int row = 0;
    for (const auto& [sat, acqs] : plan.satellites) {
      const int y = row * row_h;
      out << "<text x=\"4\" y=\"" << (y + 14) << "\" font-size=\"11\">" << sat << "</text>\n";
      for (const auto& a : acqs) {
        const double relay_x0 =
            (a.acquisition_start_ms - a.relay_duration_s_from_previous * 1000 - lo) / span * width;
        const double x0 = (a.acquisition_start_ms - lo) / span * width;
        const double x1 = (a.acquisition_start_ms + a.acquisition_duration_ms - lo) / span * width;
        out << "<rect x=\"" << relay_x0 << "\" y=\"" << (y + 20) << "\" width=\""
            << std::max(0.5, x0 - relay_x0) << "\" height=\"6\" fill=\"#bbb\"/>\n";
        out << "<rect x=\"" << x0 << "\" y=\"" << (y + 18) << "\" width=\""
            << std::max(1.0, x1 - x0) << "\" height=\"10\" fill=\"#238\"/>\n";
      }
      ++row;
    }
  }
  out << "</svg>\n";
  return out.str();
}

orbitsched::PlannerOptions planner_options(const CommonFlags& flags,
                                           orbitsched::ClusterKind cluster) {
  orbitsched::PlannerOptions opts;
  opts.cluster = cluster;
  opts.k = flags.k;
  opts.step_s = flags.step_s;
  opts.time_limit_s = flags.time_limit;
  opts.seed = flags.seed;
  opts.jobs = flags.jobs;
  opts.ppo_total_steps = flags.ppo_steps;
  opts.az_episodes = flags.az_episodes;
  opts.az_simulations = flags.az_simulations;
  opts.train_time_limit_s = flags.train_time_limit;
  return opts;
}

int cmd_generate(const CommonFlags& flags) {
  if (flags.sats < 1 || flags.requests < 0) {
    std::cerr << "usage error: --sats must be >= 1 and --requests >= 0\n";
    return 2;
  }
  orbitsched::GeneratorOptions options;
  options.n_satellites = flags.sats;
  options.n_requests = flags.requests;
  options.seed = flags.seed;
  const ProblemInstance instance = orbitsched::generate_instance(options);
  std::filesystem::create_directories(flags.out);
  orbitsched::write_file((std::filesystem::path(flags.out) / "ephemeris.json").string(),
                         orbitsched::serialize_ephemeris(instance.satellites));
  orbitsched::write_file((std::filesystem::path(flags.out) / "requests.json").string(),
                         orbitsched::serialize_requests(instance.requests));
  log_info("wrote ephemeris.json and requests.json to " + flags.out);
  return 0;
}

int cmd_plan(const CommonFlags& flags) {
  const auto planner = orbitsched::parse_planner(flags.planner);
  const auto cluster = orbitsched::parse_cluster(flags.cluster);
  if (!planner.has_value()) {
    std::cerr << "usage error: unknown planner '" << flags.planner << "'\n";
    return 2;
  }
  if (!cluster.has_value()) {
    std::cerr << "usage error: unknown clusterer '" << flags.cluster << "'\n";
    return 2;
  }
  ProblemInstance instance;
  try {
    instance = load_instance(flags.out);
  } catch (const std::exception& e) {
    std::cerr << "usage error: cannot load instance from '" << flags.out << "': " << e.what()
              << "\n";
    return 2;
  }
  log_info("planning with " + flags.planner + " / " + flags.cluster);
  const Plan plan = orbitsched::run_planner(instance, *planner, planner_options(flags, *cluster));
  const orbitsched::ValidationReport report = orbitsched::validate_plan(plan, instance);
  if (!report.ok) {
    std::cerr << "internal error: produced plan fails validation:\n";
    for (const auto& v : report.violations) {
      std::cerr << "  [" << v.rule_id << "] " << v.request_id << ": " << v.message << "\n";
    }
    return 3;
  }
  orbitsched::write_file((std::filesystem::path(flags.out) / "plan.json").string(),
                         orbitsched::serialize_plan(plan));
  std::cout << completion_table(plan);
  if (!flags.svg_map.empty()) orbitsched::write_file(flags.svg_map, svg_map(instance, plan));
  if (!flags.svg_gantt.empty()) orbitsched::write_file(flags.svg_gantt, svg_gantt(plan));
  return 0;
}

int cmd_benchmark(const CommonFlags& flags) {
  if (flags.planners.empty()) {
    std::cerr << "usage error: --planner list must not be empty\n";
    return 2;
  }
  if (flags.sats < 1 || flags.requests < 0) {
    std::cerr << "usage error: --sats must be >= 1 and --requests >= 0\n";
    return 2;
  }
  const auto cluster = orbitsched::parse_cluster(flags.cluster);
  if (!cluster.has_value()) {
    std::cerr << "usage error: unknown clusterer '" << flags.cluster << "'\n";
    return 2;
  }
  std::vector<orbitsched::PlannerKind> kinds;
  for (const auto& name : flags.planners) {
    const auto p = orbitsched::parse_planner(name);
    if (!p.has_value()) {
      std::cerr << "usage error: unknown planner '" << name << "'\n";
      return 2;
    }
    kinds.push_back(*p);
  }

  orbitsched::GeneratorOptions gen;
  gen.n_satellites = flags.sats;
  gen.n_requests = flags.requests;
  gen.seed = flags.seed;
  const ProblemInstance instance = orbitsched::generate_instance(gen);

  std::ostringstream csv;
  csv << "planner,pi1_rate,pi2_rate,pi3_rate,pi4_rate,wall_time_s,valid\n";
  csv << std::setprecision(10);
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Plan plan = orbitsched::run_planner(instance, kinds[i], planner_options(flags, *cluster));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const orbitsched::ValidationReport report = orbitsched::validate_plan(plan, instance);
    if (!report.ok) {
      std::cerr << "internal error: planner " << flags.planners[i] << " fails validation\n";
      return 3;
    }
    csv << flags.planners[i];
    for (int p = 0; p < 4; ++p) {
      const auto& s = plan.stats[static_cast<std::size_t>(p)];
      csv << "," << (s.total == 0 ? 0.0 : 100.0 * s.rate());
    }
    csv << "," << wall << ",ok\n";
  }
  const std::string table = csv.str();
  std::cout << table;
  if (!flags.out.empty() && flags.out != ".") {
    if (const auto parent = std::filesystem::path(flags.out).parent_path(); !parent.empty()) {
      std::filesystem::create_directories(parent);
    }
    orbitsched::write_file(flags.out, table);
  }
  return 0;
}

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool benchmark) {
  cmd->add_option("--sats", flags.sats, "Number of satellites");
  cmd->add_option("--requests", flags.requests, "Number of requests");
  cmd->add_option("--seed", flags.seed, "Deterministic seed");
  cmd->add_option("--out", flags.out, "Data directory (or CSV path for benchmark)");
  if (benchmark) {
    cmd->add_option("--planner", flags.planners, "Planners to compare");
  } else {
    cmd->add_option("--planner", flags.planner,
                    "Planner: greedy|ilp|qubo|ppo|alphazero");
  }
  cmd->add_option("--cluster", flags.cluster,
                  "Clusterer: kmeans|dto-bunch|priority-bunch|bunch-sort|none");
  cmd->add_option("--k", flags.k, "K-means cluster count (0 = auto)");
  cmd->add_option("--step-s", flags.step_s, "Candidate angle grid step, seconds");
  cmd->add_option("--time-limit", flags.time_limit, "Per-cluster solver budget, seconds");
  cmd->add_option("--svg-map", flags.svg_map, "Write a completion map SVG here");
  cmd->add_option("--svg-gantt", flags.svg_gantt, "Write a schedule Gantt SVG here");
  cmd->add_option("--jobs", flags.jobs, "Worker threads for per-cluster solving");
  cmd->add_option("--ppo-steps", flags.ppo_steps, "PPO training environment steps");
  cmd->add_option("--az-episodes", flags.az_episodes, "Self-play training episodes");
  cmd->add_option("--az-simulations", flags.az_simulations, "Tree-search simulations per move");
  cmd->add_option("--train-time-limit", flags.train_time_limit, "Training budget, seconds");
  cmd->add_option("--config", flags.config, "JSON config file mirroring these flags");
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CommonFlags flags;

  // The config file seeds the defaults; explicit flags override it.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    if (!path.empty()) {
      std::string error;
      if (!apply_config_file(path, flags, error)) {
        std::cerr << "usage error: " << error << "\n";
        return 2;
      }
    }
  }

  CLI::App app{"Mission planning toolkit for agile Earth-observation satellites"};
  app.require_subcommand(1);
  CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic instance");
  CLI::App* plan = app.add_subcommand("plan", "Run one planner over an instance directory");
  CLI::App* benchmark = app.add_subcommand("benchmark", "Compare planners on one instance");
  add_common_flags(generate, flags, false);
  add_common_flags(plan, flags, false);
  add_common_flags(benchmark, flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(flags);
    if (plan->parsed()) return cmd_plan(flags);
    if (benchmark->parsed()) return cmd_benchmark(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
