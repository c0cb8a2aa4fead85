#include "orbitsched/greedy.hpp"

#include <algorithm>

namespace orbitsched {

std::vector<AcquisitionRequest> satellite_requests(const ProblemInstance& instance,
                                                   const std::string& satellite_id) {
  std::vector<AcquisitionRequest> out;
  for (const auto& r : instance.requests) {
    if (r.satellite_id == satellite_id && !r.completed) out.push_back(r);
  }
  return out;
}

std::map<std::string, std::vector<Cluster>> trivial_clusters(const ProblemInstance& instance) {
  std::map<std::string, std::vector<Cluster>> out;
  for (const auto& [sat, _] : instance.satellites) {
    std::vector<AcquisitionRequest> reqs = satellite_requests(instance, sat);
    std::sort(reqs.begin(), reqs.end(),
              [](const AcquisitionRequest& a, const AcquisitionRequest& b) {
                if (a.dto_start_ms != b.dto_start_ms) return a.dto_start_ms < b.dto_start_ms;
                return a.request_id < b.request_id;
              });
    Cluster c;
    c.cluster_id = 0;
    for (const auto& r : reqs) c.request_ids.push_back(r.request_id);
    if (!c.request_ids.empty()) out[sat].push_back(std::move(c));
  }
  return out;
}

namespace {

struct Pending {
  const AcquisitionRequest* req;
  std::int64_t tau_ms;
};

std::int64_t cluster_min_dto_start(const std::vector<Pending>& pending) {
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  for (const auto& p : pending) lo = std::min(lo, p.req->dto_start_ms);
  return lo;
}

}  // namespace

Plan greedy_schedule(const ProblemInstance& instance,
                     const std::map<std::string, std::vector<Cluster>>& clusters_per_satellite) {
  Plan plan;
  for (const auto& [sat, eph] : instance.satellites) {
    std::vector<ChainedAcquisition>& schedule = plan.satellites[sat];
    const auto cl_it = clusters_per_satellite.find(sat);
    if (cl_it == clusters_per_satellite.end()) continue;

    // Clusters processed in order of their earliest DTO start.
    std::vector<const Cluster*> clusters;
    for (const auto& c : cl_it->second) {
      if (!c.request_ids.empty()) clusters.push_back(&c);
    }
    std::sort(clusters.begin(), clusters.end(), [&instance](const Cluster* a, const Cluster* b) {
      std::int64_t sa = std::numeric_limits<std::int64_t>::max();
      std::int64_t sb = sa;
      for (const auto& id : a->request_ids) {
        sa = std::min(sa, instance.find_request(id)->dto_start_ms);
      }
      for (const auto& id : b->request_ids) {
        sb = std::min(sb, instance.find_request(id)->dto_start_ms);
      }
      if (sa != sb) return sa < sb;
      return a->cluster_id < b->cluster_id;
    });

    std::int64_t now = eph.front().timestamp_ms;
    Attitude attitude{};  // nadir before the first acquisition
    bool first = true;

    for (const Cluster* cluster : clusters) {
      std::vector<Pending> pending;
      for (const auto& id : cluster->request_ids) {
        const AcquisitionRequest* r = instance.find_request(id);
        if (r == nullptr || r->completed) continue;
        pending.push_back({r, r->acquisition_ms()});
      }
      if (pending.empty()) continue;
      // Jumps stay on the whole-second grid anchored at the last acquisition
      // end so the committed relays match the 1 s relay iteration.
      const std::int64_t cluster_open = cluster_min_dto_start(pending);
      if (cluster_open > now) now += (cluster_open - now + 999) / 1000 * 1000;

      while (!pending.empty()) {
        // Requests whose window is open at the current timestamp.
        std::vector<std::size_t> available;
        std::int64_t next_open = std::numeric_limits<std::int64_t>::max();
        for (std::size_t i = 0; i < pending.size(); ++i) {
          const auto* r = pending[i].req;
          if (r->dto_start_ms <= now && now <= r->dto_end_ms - pending[i].tau_ms) {
            available.push_back(i);
          } else if (r->dto_start_ms > now) {
            next_open = std::min(next_open, r->dto_start_ms);
          }
        }
        if (available.empty()) {
          // Expired requests can never come back.
          std::erase_if(pending, [now](const Pending& p) {
            return p.req->dto_end_ms - p.tau_ms < now;
          });
          if (pending.empty()) break;
          if (next_open == std::numeric_limits<std::int64_t>::max()) break;
          now += (next_open - now + 999) / 1000 * 1000;
          continue;
        }

        // Highest priority first; ties go to the more urgent window.
        std::size_t pick = available[0];
        for (std::size_t i : available) {
          const auto* a = pending[i].req;
          const auto* b = pending[pick].req;
          if (a->priority < b->priority ||
              (a->priority == b->priority && a->dto_end_ms < b->dto_end_ms)) {
            pick = i;
          }
        }

        const AcquisitionRequest& req = *pending[pick].req;
        const auto d =
            min_relay_from_attitude(now, attitude, req.geometry(), eph, first ? 0 : 1);
        if (!d.has_value()) {
          pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
          continue;
        }
        const std::int64_t start = now + *d * 1000;
        const std::int64_t end = start + pending[pick].tau_ms;
        ChainedAcquisition acq;
        acq.request_id = req.request_id;
        acq.acquisition_start_ms = start;
        acq.acquisition_duration_ms = pending[pick].tau_ms;
        acq.relay_duration_s_from_previous = *d;
        acq.start_attitude = attitude_pointing(interpolate_state(eph, start), req.median_start, start);
        acq.end_attitude = attitude_pointing(interpolate_state(eph, end), req.median_end, end);
        schedule.push_back(acq);

        attitude = acq.end_attitude;
        now = end;
        first = false;
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
  }
  compute_stats(plan, instance);
  return plan;
}

}  // namespace orbitsched
