#pragma once

#include <map>
#include <string>
#include <vector>

#include "orbitsched/clustering.hpp"
#include "orbitsched/core_model.hpp"

namespace orbitsched {

// Baseline scheduler: per satellite, per cluster in DTO-start order, a 1 s
// clock commits the highest-priority request available at each timestamp.
// `clusters_per_satellite` must partition each satellite's incomplete requests.
Plan greedy_schedule(const ProblemInstance& instance,
                     const std::map<std::string, std::vector<Cluster>>& clusters_per_satellite);

// Convenience: one cluster per satellite holding all its incomplete requests.
std::map<std::string, std::vector<Cluster>> trivial_clusters(const ProblemInstance& instance);

// Requests of one satellite that are plannable (not pre-completed).
std::vector<AcquisitionRequest> satellite_requests(const ProblemInstance& instance,
                                                   const std::string& satellite_id);

}  // namespace orbitsched
