#include "orbitsched/chaining.hpp"

#include <algorithm>
#include <sstream>

namespace orbitsched {

namespace {

// Smallest relay d >= max(1, gap to the intended start) whose arrival stays
// inside the DTO. nullopt when the window closes first.
std::optional<std::int64_t> relay_no_earlier_than(std::int64_t prev_end_ms,
                                                 const Attitude& prev_att,
                                                 const AcquisitionRequest& req,
                                                 std::int64_t intended_start_ms,
                                                 const std::vector<EphemerisRecord>& eph) {
  std::int64_t d0 = 1;
  if (intended_start_ms > prev_end_ms) {
    d0 = std::max<std::int64_t>(d0, (intended_start_ms - prev_end_ms + 999) / 1000);
  }
  return min_relay_from_attitude(prev_end_ms, prev_att, req.geometry(), eph, d0);
}

ChainedAcquisition make_acq(const AcquisitionRequest& req, std::int64_t start_ms,
                            std::int64_t relay_s, const std::vector<EphemerisRecord>& eph) {
  ChainedAcquisition a;
  a.request_id = req.request_id;
  a.acquisition_start_ms = start_ms;
  a.acquisition_duration_ms = req.acquisition_ms();
  a.relay_duration_s_from_previous = relay_s;
  const std::int64_t end_ms = start_ms + a.acquisition_duration_ms;
  a.start_attitude = attitude_pointing(interpolate_state(eph, start_ms), req.median_start, start_ms);
  a.end_attitude = attitude_pointing(interpolate_state(eph, end_ms), req.median_end, end_ms);
  return a;
}

std::int64_t chain_deficit_s(std::int64_t prev_end_ms, const Attitude& prev_att,
                             const AcquisitionRequest& req,
                             const std::vector<EphemerisRecord>& eph) {
  const std::int64_t latest_start = req.dto_end_ms - req.acquisition_ms();
  if (latest_start < prev_end_ms + 1000) {
    return 1 + (prev_end_ms + 1000 - latest_start + 999) / 1000;
  }
  const std::int64_t avail_s = (latest_start - prev_end_ms) / 1000;
  const Attitude att =
      attitude_pointing(interpolate_state(eph, latest_start), req.median_start, latest_start);
  return std::max<std::int64_t>(1, maneuver_duration_s(prev_att, att) - avail_s);
}

}  // namespace

ChainResult chain(const std::vector<ChainCandidate>& candidates,
                  const std::vector<EphemerisRecord>& ephemeris) {
  std::vector<ChainedAcquisition> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const AcquisitionRequest& req = *candidates[i].request;
    const std::int64_t tau = req.acquisition_ms();
    if (out.empty()) {
      const std::int64_t latest = req.dto_end_ms - tau;
      if (latest < req.dto_start_ms) {
        return ChainError{i, i, req.request_id, req.request_id, 1};
      }
      const std::int64_t start =
          std::clamp(candidates[i].intended_start_ms, req.dto_start_ms, latest);
      const Attitude nadir{};
      const Attitude att =
          attitude_pointing(interpolate_state(ephemeris, start), req.median_start, start);
      out.push_back(make_acq(req, start, maneuver_duration_s(nadir, att), ephemeris));
      continue;
    }
    const ChainedAcquisition& prev = out.back();
    const std::int64_t prev_end = prev.acquisition_start_ms + prev.acquisition_duration_ms;
    const auto d = relay_no_earlier_than(prev_end, prev.end_attitude, req,
                                         candidates[i].intended_start_ms, ephemeris);
    if (!d.has_value()) {
      return ChainError{i - 1, i, prev.request_id, req.request_id,
                        chain_deficit_s(prev_end, prev.end_attitude, req, ephemeris)};
    }
    out.push_back(make_acq(req, prev_end + *d * 1000, *d, ephemeris));
  }
  return out;
}

LinkedPlan link_clusters(const std::vector<std::vector<ChainCandidate>>& cluster_candidates,
                         const std::vector<EphemerisRecord>& ephemeris) {
  LinkedPlan plan;
  for (const auto& cluster : cluster_candidates) {
    for (const auto& cand : cluster) {
      const AcquisitionRequest& req = *cand.request;
      const std::int64_t tau = req.acquisition_ms();
      if (plan.acquisitions.empty()) {
        const std::int64_t latest = req.dto_end_ms - tau;
        if (latest < req.dto_start_ms) {
          plan.dropped_request_ids.push_back(req.request_id);
          continue;
        }
        const std::int64_t start =
            std::clamp(cand.intended_start_ms, req.dto_start_ms, latest);
        const Attitude nadir{};
        const Attitude att =
            attitude_pointing(interpolate_state(ephemeris, start), req.median_start, start);
        plan.acquisitions.push_back(make_acq(req, start, maneuver_duration_s(nadir, att), ephemeris));
        continue;
      }
      const ChainedAcquisition& prev = plan.acquisitions.back();
      const std::int64_t prev_end = prev.acquisition_start_ms + prev.acquisition_duration_ms;
      const auto d = relay_no_earlier_than(prev_end, prev.end_attitude, req,
                                           cand.intended_start_ms, ephemeris);
      if (!d.has_value()) {
        plan.dropped_request_ids.push_back(req.request_id);
        continue;
      }
      plan.acquisitions.push_back(make_acq(req, prev_end + *d * 1000, *d, ephemeris));
    }
  }
  return plan;
}

std::string gantt_csv(const Plan& plan) {
  std::ostringstream out;
  out << "satellite_id,request_id,start_ms,end_ms,relay_s\n";
  for (const auto& [sat, acqs] : plan.satellites) {
    for (const auto& a : acqs) {
      out << sat << ',' << a.request_id << ',' << a.acquisition_start_ms << ','
          << a.acquisition_start_ms + a.acquisition_duration_ms << ','
          << a.relay_duration_s_from_previous << '\n';
    }
  }
  return out.str();
}

}  // namespace orbitsched
