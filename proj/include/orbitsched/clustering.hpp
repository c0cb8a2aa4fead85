#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitsched/core_model.hpp"

namespace orbitsched {

struct Cluster {
  int cluster_id{0};
  std::vector<std::string> request_ids;  // ordered
  std::optional<GeoPoint> centroid;
};

// Geographic point a request is keyed by: midpoint of its median line.
GeoPoint request_midpoint(const AcquisitionRequest& request);

// Lloyd iterations on great-circle distance. Initial centroids are drawn
// uniformly from the points; an emptied centroid is re-seeded at the point
// farthest from its nearest centroid. Clusters come back with members sorted
// by DTO start.
std::vector<Cluster> kmeans(const std::vector<AcquisitionRequest>& requests, int k,
                            double tol_deg, int max_iter, std::uint64_t seed);

// Greedy grouping of DTO-start-sorted requests: a request joins the current
// cluster iff its window overlaps the running intersection of the cluster.
std::vector<Cluster> dto_bunch(const std::vector<AcquisitionRequest>& requests);

// One cluster per present priority, ordered pi1..pi4, each sorted by DTO start.
std::vector<Cluster> priority_bunch(const std::vector<AcquisitionRequest>& requests);

// dto_bunch grouping, re-sorted inside each cluster by (priority, DTO end).
std::vector<Cluster> bunch_sort(const std::vector<AcquisitionRequest>& requests);

// Sum of squared great-circle distances to assigned centroids (degrees of arc).
double kmeans_objective(const std::vector<AcquisitionRequest>& requests,
                        const std::vector<Cluster>& clusters);

}  // namespace orbitsched
