#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orbitsched/geometry.hpp"

namespace orbitsched {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AcquisitionRequest {
  std::string request_id;
  int priority{4};  // 1 highest .. 4 lowest
  std::int64_t dto_start_ms{0};
  std::int64_t dto_end_ms{0};
  GeoPoint median_start;
  GeoPoint median_end;
  std::string satellite_id;
  bool completed{false};

  RequestGeometry geometry() const {
    return {median_start, median_end, dto_start_ms, dto_end_ms};
  }
  std::int64_t acquisition_ms() const {
    return acquisition_duration_ms(median_start, median_end);
  }
};

struct PlanningConfig {
  double rotation_rate_deg_s{constants::kSlewRateDegS};
  double max_depointing_deg{constants::kMaxDepointingDeg};
  double earth_radius_km{constants::kEarthRadiusKm};
};

using EphemerisMap = std::map<std::string, std::vector<EphemerisRecord>>;

struct ProblemInstance {
  EphemerisMap satellites;
  std::vector<AcquisitionRequest> requests;
  PlanningConfig config;

  const AcquisitionRequest* find_request(const std::string& id) const;
};

struct ChainedAcquisition {
  std::string request_id;
  std::int64_t acquisition_start_ms{0};
  std::int64_t acquisition_duration_ms{0};
  std::int64_t relay_duration_s_from_previous{0};
  Attitude start_attitude;
  Attitude end_attitude;
};

struct PriorityStats {
  int total{0};
  int completed{0};
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(completed) / total; }
};

struct Plan {
  std::map<std::string, std::vector<ChainedAcquisition>> satellites;
  std::array<PriorityStats, 4> stats;  // index 0 -> priority 1

  std::size_t size() const;
};

struct Violation {
  std::string rule_id;
  std::string request_id;
  std::string message;
};

struct ValidationReport {
  bool ok{true};
  std::vector<Violation> violations;
  std::vector<std::string> notes;  // informational, e.g. priority ordering
};

// --- file I/O ------------------------------------------------------------

EphemerisMap parse_ephemeris(const std::string& path);
EphemerisMap parse_ephemeris_text(const std::string& text);
std::string serialize_ephemeris(const EphemerisMap& ephemeris);

std::vector<AcquisitionRequest> parse_requests(const std::string& path);
std::vector<AcquisitionRequest> parse_requests_text(const std::string& text);
std::string serialize_requests(const std::vector<AcquisitionRequest>& requests);

std::string serialize_plan(const Plan& plan);
Plan parse_plan_text(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// --- generation ----------------------------------------------------------

struct GeneratorOptions {
  int n_satellites{1};
  int n_requests{0};
  // Fraction of priority 1..4 requests; must sum to 1.
  std::array<double, 4> priority_mix{0.1, 0.2, 0.3, 0.4};
  std::uint64_t seed{0};
  // Time span covered by the ephemeris, seconds.
  std::int64_t span_s{86400};
  std::int64_t ephemeris_step_s{20};
};

ProblemInstance generate_instance(const GeneratorOptions& options);

// Epoch the generator anchors its ephemerides to.
inline constexpr std::int64_t kGeneratorEpochMs = 1'600'000'000'000;

// --- plan bookkeeping -----------------------------------------------------

void compute_stats(Plan& plan, const ProblemInstance& instance);
ValidationReport validate_plan(const Plan& plan, const ProblemInstance& instance);

}  // namespace orbitsched
