#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "orbitsched/core_model.hpp"

namespace orbitsched {

struct ChainCandidate {
  const AcquisitionRequest* request{nullptr};
  std::int64_t intended_start_ms{0};
};

struct ChainError {
  std::size_t first_index{0};
  std::size_t second_index{0};
  std::string first_id;
  std::string second_id;
  std::int64_t deficit_s{0};
};

using ChainResult = std::variant<std::vector<ChainedAcquisition>, ChainError>;

// Connects candidates for one satellite in their given order, inserting relay
// durations and shifting starts later (never earlier, never outside the DTO).
// Fails fast on the first unchainable pair.
ChainResult chain(const std::vector<ChainCandidate>& candidates,
                  const std::vector<EphemerisRecord>& ephemeris);

struct LinkedPlan {
  std::vector<ChainedAcquisition> acquisitions;
  std::vector<std::string> dropped_request_ids;
};

// Connects per-cluster chains end to end. A request whose trimmed window can
// no longer hold its acquisition is dropped and recorded.
LinkedPlan link_clusters(const std::vector<std::vector<ChainCandidate>>& cluster_candidates,
                         const std::vector<EphemerisRecord>& ephemeris);

// Gantt description for the CLI plotter: request_id, start_ms, end_ms, relay_s.
std::string gantt_csv(const Plan& plan);

}  // namespace orbitsched
