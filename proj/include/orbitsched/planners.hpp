#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbitsched/clustering.hpp"
#include "orbitsched/core_model.hpp"

namespace orbitsched {

enum class PlannerKind { kGreedy, kIlp, kQubo, kPpo, kAlphaZero };
enum class ClusterKind { kKmeans, kDtoBunch, kPriorityBunch, kBunchSort, kNone };

std::optional<PlannerKind> parse_planner(const std::string& name);
std::optional<ClusterKind> parse_cluster(const std::string& name);
std::string planner_name(PlannerKind kind);
std::string cluster_name(ClusterKind kind);

struct PlannerOptions {
  ClusterKind cluster{ClusterKind::kNone};
  int k{0};  // k-means cluster count; 0 picks ceil(n / 8)
  std::int64_t step_s{30};
  double time_limit_s{10.0};  // per-cluster branch-and-bound budget
  int max_cluster_requests{8};  // larger clusters are split in DTO order
  int anneal_sweeps{2000};
  int anneal_restarts{4};
  std::uint64_t seed{0};
  int jobs{1};
  // RL training budgets; 0 deploys freshly initialized nets.
  int ppo_total_steps{2000};
  int ppo_rollout_steps{256};
  int az_episodes{8};
  int az_simulations{16};
  double train_time_limit_s{300.0};
};

// Per-satellite clusters of the instance's incomplete requests.
std::map<std::string, std::vector<Cluster>> make_clusters(const ProblemInstance& instance,
                                                          ClusterKind kind, int k,
                                                          std::uint64_t seed);

// Full pipeline: cluster, plan, chain/link, compute stats.
Plan run_planner(const ProblemInstance& instance, PlannerKind kind,
                 const PlannerOptions& options);

}  // namespace orbitsched
