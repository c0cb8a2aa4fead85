#include "orbitsched/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "orbitsched/rng.hpp"

namespace orbitsched {

GeoPoint request_midpoint(const AcquisitionRequest& request) {
  const Vec3 a = geodetic_to_eci(request.median_start, 0);
  const Vec3 b = geodetic_to_eci(request.median_end, 0);
  const Vec3 sum = a + b;
  if (norm(sum) < 1e-9) return request.median_start;  // antipodal, degenerate
  return eci_to_geodetic(normalized(sum) * constants::kEarthRadiusKm, 0);
}

namespace {

double arc_deg(const GeoPoint& a, const GeoPoint& b) {
  return great_circle_km(a, b) / constants::kEarthRadiusKm * 180.0 / constants::kPi;
}

GeoPoint spherical_mean(const std::vector<GeoPoint>& points) {
  Vec3 sum{0, 0, 0};
  for (const auto& p : points) sum = sum + geodetic_to_eci(p, 0);
  if (norm(sum) < 1e-9) return points.front();
  return eci_to_geodetic(normalized(sum) * constants::kEarthRadiusKm, 0);
}

void sort_by_dto_start(std::vector<std::size_t>& idx,
                       const std::vector<AcquisitionRequest>& requests) {
  std::sort(idx.begin(), idx.end(), [&requests](std::size_t a, std::size_t b) {
    if (requests[a].dto_start_ms != requests[b].dto_start_ms) {
      return requests[a].dto_start_ms < requests[b].dto_start_ms;
    }
    return requests[a].request_id < requests[b].request_id;
  });
}

}  // namespace

std::vector<Cluster> kmeans(const std::vector<AcquisitionRequest>& requests, int k,
                            double tol_deg, int max_iter, std::uint64_t seed) {
  if (requests.empty()) throw std::invalid_argument("kmeans: empty input");
  if (k < 1 || static_cast<std::size_t>(k) > requests.size()) {
    throw std::invalid_argument("kmeans: k out of range");
  }

  std::vector<GeoPoint> points;
  points.reserve(requests.size());
  for (const auto& r : requests) points.push_back(request_midpoint(r));

  Rng rng(seed);
  std::vector<GeoPoint> centroids;
  std::vector<std::size_t> taken;
  while (centroids.size() < static_cast<std::size_t>(k)) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform_int(points.size()));
    if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
    taken.push_back(i);
    centroids.push_back(points[i]);
  }

  std::vector<int> assignment(points.size(), 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      double best_d = arc_deg(points[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = arc_deg(points[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment[i] = best;
    }

    std::vector<std::vector<GeoPoint>> members(k);
    for (std::size_t i = 0; i < points.size(); ++i) members[assignment[i]].push_back(points[i]);

    // Re-seed emptied centroids at the point farthest from its nearest centroid.
    for (int c = 0; c < k; ++c) {
      if (!members[c].empty()) continue;
      double worst = -1.0;
      std::size_t worst_i = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        double nearest = 1e300;
        for (int c2 = 0; c2 < k; ++c2) {
          nearest = std::min(nearest, arc_deg(points[i], centroids[c2]));
        }
        if (nearest > worst) {
          worst = nearest;
          worst_i = i;
        }
      }
      centroids[c] = points[worst_i];
      assignment[worst_i] = c;
      members[c].push_back(points[worst_i]);
    }

    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (members[c].empty()) continue;
      const GeoPoint updated = spherical_mean(members[c]);
      max_shift = std::max(max_shift, arc_deg(centroids[c], updated));
      centroids[c] = updated;
    }
    if (max_shift < tol_deg) break;
  }

  // Final assignment against the converged centroids.
  std::vector<std::vector<std::size_t>> idx(k);
  for (std::size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_d = arc_deg(points[i], centroids[0]);
    for (int c = 1; c < k; ++c) {
      const double d = arc_deg(points[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    idx[best].push_back(i);
  }

  std::vector<Cluster> clusters;
  for (int c = 0; c < k; ++c) {
    if (idx[c].empty()) continue;
    sort_by_dto_start(idx[c], requests);
    Cluster cl;
    cl.cluster_id = static_cast<int>(clusters.size());
    cl.centroid = centroids[c];
    for (std::size_t i : idx[c]) cl.request_ids.push_back(requests[i].request_id);
    clusters.push_back(std::move(cl));
  }
  return clusters;
}

double kmeans_objective(const std::vector<AcquisitionRequest>& requests,
                        const std::vector<Cluster>& clusters) {
  std::map<std::string, const AcquisitionRequest*> by_id;
  for (const auto& r : requests) by_id[r.request_id] = &r;
  double obj = 0.0;
  for (const auto& c : clusters) {
    if (!c.centroid) continue;
    for (const auto& id : c.request_ids) {
      const double d = arc_deg(request_midpoint(*by_id.at(id)), *c.centroid);
      obj += d * d;
    }
  }
  return obj;
}

std::vector<Cluster> dto_bunch(const std::vector<AcquisitionRequest>& requests) {
  std::vector<std::size_t> order(requests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  sort_by_dto_start(order, requests);

  std::vector<Cluster> clusters;
  std::int64_t isect_start = 0;
  std::int64_t isect_end = 0;
  for (std::size_t i : order) {
    const auto& r = requests[i];
    const bool overlaps = !clusters.empty() &&
                          r.dto_start_ms < isect_end && r.dto_end_ms > isect_start;
    if (overlaps) {
      clusters.back().request_ids.push_back(r.request_id);
      isect_start = std::max(isect_start, r.dto_start_ms);
      isect_end = std::min(isect_end, r.dto_end_ms);
    } else {
      Cluster c;
      c.cluster_id = static_cast<int>(clusters.size());
      c.request_ids.push_back(r.request_id);
      clusters.push_back(std::move(c));
      isect_start = r.dto_start_ms;
      isect_end = r.dto_end_ms;
    }
  }
  return clusters;
}

std::vector<Cluster> priority_bunch(const std::vector<AcquisitionRequest>& requests) {
  std::vector<Cluster> clusters;
  for (int p = 1; p <= 4; ++p) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (requests[i].priority == p) idx.push_back(i);
    }
    if (idx.empty()) continue;
    sort_by_dto_start(idx, requests);
    Cluster c;
    c.cluster_id = static_cast<int>(clusters.size());
    for (std::size_t i : idx) c.request_ids.push_back(requests[i].request_id);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

std::vector<Cluster> bunch_sort(const std::vector<AcquisitionRequest>& requests) {
  std::map<std::string, const AcquisitionRequest*> by_id;
  for (const auto& r : requests) by_id[r.request_id] = &r;
  std::vector<Cluster> clusters = dto_bunch(requests);
  for (auto& c : clusters) {
    std::stable_sort(c.request_ids.begin(), c.request_ids.end(),
                     [&by_id](const std::string& a, const std::string& b) {
                       const auto* ra = by_id.at(a);
                       const auto* rb = by_id.at(b);
                       if (ra->priority != rb->priority) return ra->priority < rb->priority;
                       return ra->dto_end_ms < rb->dto_end_ms;
                     });
  }
  return clusters;
}

}  // namespace orbitsched
