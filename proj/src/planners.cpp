#include "orbitsched/planners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "orbitsched/chaining.hpp"
#include "orbitsched/greedy.hpp"
#include "orbitsched/ilp.hpp"
#include "orbitsched/qubo.hpp"
#include "orbitsched/rl.hpp"
#include "orbitsched/rng.hpp"

namespace orbitsched {

std::optional<PlannerKind> parse_planner(const std::string& name) {
  if (name == "greedy") return PlannerKind::kGreedy;
  if (name == "ilp") return PlannerKind::kIlp;
  if (name == "qubo") return PlannerKind::kQubo;
  if (name == "ppo") return PlannerKind::kPpo;
  if (name == "alphazero") return PlannerKind::kAlphaZero;
  return std::nullopt;
}

std::optional<ClusterKind> parse_cluster(const std::string& name) {
  if (name == "kmeans") return ClusterKind::kKmeans;
  if (name == "dto-bunch") return ClusterKind::kDtoBunch;
  if (name == "priority-bunch") return ClusterKind::kPriorityBunch;
  if (name == "bunch-sort") return ClusterKind::kBunchSort;
  if (name == "none") return ClusterKind::kNone;
  return std::nullopt;
}

std::string planner_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kGreedy: return "greedy";
    case PlannerKind::kIlp: return "ilp";
    case PlannerKind::kQubo: return "qubo";
    case PlannerKind::kPpo: return "ppo";
    case PlannerKind::kAlphaZero: return "alphazero";
  }
  return "?";
}

std::string cluster_name(ClusterKind kind) {
  switch (kind) {
    case ClusterKind::kKmeans: return "kmeans";
    case ClusterKind::kDtoBunch: return "dto-bunch";
    case ClusterKind::kPriorityBunch: return "priority-bunch";
    case ClusterKind::kBunchSort: return "bunch-sort";
    case ClusterKind::kNone: return "none";
  }
  return "?";
}

std::map<std::string, std::vector<Cluster>> make_clusters(const ProblemInstance& instance,
                                                          ClusterKind kind, int k,
                                                          std::uint64_t seed) {
  if (kind == ClusterKind::kNone) return trivial_clusters(instance);
  std::map<std::string, std::vector<Cluster>> out;
  for (const auto& [sat, eph] : instance.satellites) {
    (void)eph;
    const std::vector<AcquisitionRequest> reqs = satellite_requests(instance, sat);
    if (reqs.empty()) continue;
    std::vector<Cluster> clusters;
    switch (kind) {
      case ClusterKind::kKmeans: {
        const int n = static_cast<int>(reqs.size());
        const int kk = k > 0 ? std::min(k, n) : std::max(1, (n + 7) / 8);
        clusters = kmeans(reqs, kk, 1e-6, 100, seed);
        break;
      }
      case ClusterKind::kDtoBunch:
        clusters = dto_bunch(reqs);
        break;
      case ClusterKind::kPriorityBunch:
        clusters = priority_bunch(reqs);
        break;
      case ClusterKind::kBunchSort:
        clusters = bunch_sort(reqs);
        break;
      case ClusterKind::kNone:
        break;
    }
    if (!clusters.empty()) out[sat] = std::move(clusters);
  }
  return out;
}

namespace {

// Oversized clusters are cut into consecutive chunks so the exact solvers
// stay tractable; the chunk order preserves the cluster order.
std::vector<std::vector<const AcquisitionRequest*>> chunked_clusters(
    const ProblemInstance& instance, const std::vector<Cluster>& clusters, int max_requests) {
  std::vector<std::vector<const AcquisitionRequest*>> out;
  for (const Cluster& c : clusters) {
    std::vector<const AcquisitionRequest*> members;
    for (const auto& id : c.request_ids) {
      const AcquisitionRequest* r = instance.find_request(id);
      if (r != nullptr && !r->completed) members.push_back(r);
    }
    for (std::size_t start = 0; start < members.size();
         start += static_cast<std::size_t>(max_requests)) {
      const std::size_t stop =
          std::min(members.size(), start + static_cast<std::size_t>(max_requests));
      out.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(start),
                       members.begin() + static_cast<std::ptrdiff_t>(stop));
    }
  }
  return out;
}

std::vector<ChainCandidate> candidates_from_sequence(
    const AngleGrid& grid, const std::vector<std::pair<std::size_t, std::size_t>>& sequence) {
  std::vector<ChainCandidate> out;
  for (const auto& [f, alpha] : sequence) {
    out.push_back({grid.requests[f].request, grid.requests[f].candidates[alpha].start_ms});
  }
  return out;
}

// Selected per-cluster sequences, solved one task per chunk (optionally in
// parallel), then linked into one chain per satellite.
Plan exact_pipeline(const ProblemInstance& instance, const PlannerOptions& options,
                    bool use_qubo) {
  struct Task {
    std::string satellite;
    std::size_t order;  // link position within the satellite
    std::vector<const AcquisitionRequest*> members;
    std::vector<ChainCandidate> selection;
  };
  std::vector<Task> tasks;
  const auto clusters = make_clusters(instance, options.cluster, options.k, options.seed);
  for (const auto& [sat, sat_clusters] : clusters) {
    auto chunks = chunked_clusters(instance, sat_clusters, std::max(1, options.max_cluster_requests));
    // Chunks are linked end to end per satellite, so consume them in the order
    // their windows open rather than in the clusterer's arbitrary order.
    std::stable_sort(chunks.begin(), chunks.end(),
                     [](const std::vector<const AcquisitionRequest*>& a,
                        const std::vector<const AcquisitionRequest*>& b) {
                       std::int64_t sa = std::numeric_limits<std::int64_t>::max();
                       std::int64_t sb = sa;
                       for (const auto* r : a) sa = std::min(sa, r->dto_start_ms);
                       for (const auto* r : b) sb = std::min(sb, r->dto_start_ms);
                       return sa < sb;
                     });
    std::size_t order = 0;
    for (auto& chunk : chunks) {
      tasks.push_back({sat, order++, std::move(chunk), {}});
    }
  }

  const auto solve_task = [&](Task& task) {
    const auto& eph = instance.satellites.at(task.satellite);
    const AngleGrid grid = build_angle_grid(task.members, eph, options.step_s);
    if (grid.requests.empty()) return;
    const TransitionTable transitions = build_transitions(grid, eph);
    const IlpModel model = build_model(grid, transitions);
    if (!use_qubo) {
      const Assignment best = solve_bb(model, options.time_limit_s);
      task.selection = candidates_from_sequence(grid, decode_sequence(model, best.bits));
      return;
    }
    const QuboModel qubo = to_qubo(model);
    std::vector<std::uint8_t> best_bits;
    double best_objective = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, options.anneal_restarts); ++r) {
      const AnnealResult res =
          anneal(qubo, options.anneal_sweeps, std::max(1.0, qubo.beta), 0.05,
                 options.seed * 1000003ull + static_cast<std::uint64_t>(r));
      std::vector<std::uint8_t> bits(res.bits.begin(),
                                     res.bits.begin() + static_cast<std::ptrdiff_t>(model.n_vars));
      if (!assignment_satisfies(model, bits)) continue;
      const double obj = evaluate_assignment(model, bits);
      if (obj > best_objective) {
        best_objective = obj;
        best_bits = std::move(bits);
      }
    }
    // No feasible decode: fall back to scheduling nothing in this cluster.
    if (best_bits.empty()) return;
    task.selection = candidates_from_sequence(grid, decode_sequence(model, best_bits));
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || tasks.size() <= 1) {
    for (Task& t : tasks) solve_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min(static_cast<std::size_t>(jobs), tasks.size());
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          solve_task(tasks[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  Plan plan;
  for (const auto& [sat, eph] : instance.satellites) {
    std::vector<std::vector<ChainCandidate>> per_cluster;
    for (const Task& t : tasks) {
      if (t.satellite == sat && !t.selection.empty()) per_cluster.push_back(t.selection);
    }
    LinkedPlan linked = link_clusters(per_cluster, eph);
    plan.satellites[sat] = std::move(linked.acquisitions);
  }
  compute_stats(plan, instance);
  return plan;
}

const std::string* busiest_satellite(const ProblemInstance& instance) {
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [sat, eph] : instance.satellites) {
    (void)eph;
    std::size_t count = 0;
    for (const auto& r : instance.requests) {
      if (r.satellite_id == sat && !r.completed) ++count;
    }
    if (best == nullptr || count > best_count) {
      best = &sat;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

Plan run_planner(const ProblemInstance& instance, PlannerKind kind,
                 const PlannerOptions& options) {
  switch (kind) {
    case PlannerKind::kGreedy:
      return greedy_schedule(instance,
                             make_clusters(instance, options.cluster, options.k, options.seed));
    case PlannerKind::kIlp:
      return exact_pipeline(instance, options, /*use_qubo=*/false);
    case PlannerKind::kQubo:
      return exact_pipeline(instance, options, /*use_qubo=*/true);
    case PlannerKind::kPpo: {
      const std::string* sat = busiest_satellite(instance);
      if (sat == nullptr) {
        Plan plan;
        compute_stats(plan, instance);
        return plan;
      }
      if (options.ppo_total_steps <= 0) {
        Rng rng(options.seed);
        const Policy policy = Policy::make(PolicyKind::kClassical, kSatObsDim, kSatObsSlots, rng);
        return plan_with_policy(instance, policy);
      }
      PpoConfig config;
      config.total_steps = options.ppo_total_steps;
      config.rollout_steps = options.ppo_rollout_steps;
      config.time_limit_s = options.train_time_limit_s;
      const PpoResult trained =
          train_ppo(make_sat_env(instance, *sat), PolicyKind::kClassical, config, options.seed);
      return plan_with_policy(instance, trained.policy);
    }
    case PlannerKind::kAlphaZero: {
      const std::string* sat = busiest_satellite(instance);
      if (sat == nullptr) {
        Plan plan;
        compute_stats(plan, instance);
        return plan;
      }
      MctsConfig mcts{std::max(1, options.az_simulations), 1.5};
      if (options.az_episodes <= 0) {
        Rng rng(options.seed);
        const Policy policy = Policy::make(PolicyKind::kHybrid, kSatObsDim, kSatObsSlots, rng);
        return plan_with_mcts(instance, policy, mcts, options.seed);
      }
      AlphaZeroConfig config;
      config.episodes = options.az_episodes;
      config.n_simulations = std::max(1, options.az_simulations);
      config.time_limit_s = options.train_time_limit_s;
      const AlphaZeroResult trained =
          train_alphazero(make_sat_env(instance, *sat), config, options.seed);
      return plan_with_mcts(instance, trained.policy, mcts, options.seed);
    }
  }
  throw std::invalid_argument("unknown planner");
}

}  // namespace orbitsched
