#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "orbitsched/core_model.hpp"

namespace orbitsched {

struct AngleCandidate {
  std::int64_t start_ms{0};
  Attitude start_attitude;
  Attitude end_attitude;
};

struct GridRequest {
  const AcquisitionRequest* request{nullptr};
  std::int64_t tau_ms{0};
  std::vector<AngleCandidate> candidates;  // strictly increasing start times
};

struct AngleGrid {
  std::vector<GridRequest> requests;
  std::vector<std::string> excluded_request_ids;  // window shorter than tau
};

// Candidate acquisition starts every step_s seconds across each DTO.
AngleGrid build_angle_grid(const std::vector<const AcquisitionRequest*>& cluster,
                           const std::vector<EphemerisRecord>& ephemeris, std::int64_t step_s);

struct TransitionTable {
  // mapping[{f1,f2}][alpha1] = alpha2 index of f2 (or -1 when infeasible).
  // A pair is in L iff it has at least one feasible entry.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> mapping;

  bool in_l(std::size_t f1, std::size_t f2) const;
};

TransitionTable build_transitions(const AngleGrid& grid,
                                  const std::vector<EphemerisRecord>& ephemeris);

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LinearRow {
  std::string tag;  // eq7..eq19
  std::vector<std::pair<int, double>> terms;
  RowSense sense{RowSense::LessEqual};
  double rhs{0.0};
};

struct IlpModel {
  std::size_t n_requests{0};
  std::size_t n_slots{0};
  int n_vars{0};
  std::vector<std::string> var_names;
  std::vector<double> objective;  // maximize
  std::vector<LinearRow> rows;
  std::vector<double> weights;                // J_f
  std::vector<std::vector<double>> gamma;     // gamma[f][alpha]

  int x_index(std::size_t f, std::size_t q) const;
  int y_index(std::size_t f, std::size_t alpha) const;
  int kappa_index(std::size_t f1, std::size_t f2) const;  // -1 when f1 == f2

  std::vector<std::size_t> y_offsets;  // per request, offset into y block
  std::vector<std::size_t> y_counts;
};

// Priority weights: 1 for the lowest priority present; each higher class
// weighs one more than the sum of all lower-priority weights.
std::vector<double> priority_weights(const std::vector<const AcquisitionRequest*>& cluster);

IlpModel build_model(const AngleGrid& grid, const TransitionTable& transitions);

struct Assignment {
  std::vector<std::uint8_t> bits;
  double objective{0.0};
  bool proven_optimal{true};
};

// Canonical objective evaluation, summed in fixed variable order.
double evaluate_assignment(const IlpModel& model, const std::vector<std::uint8_t>& bits);

bool assignment_satisfies(const IlpModel& model, const std::vector<std::uint8_t>& bits,
                          std::string* first_violated_tag = nullptr);

// Depth-first branch and bound with unit propagation; exact when it finishes
// within the time limit, otherwise best-so-far with proven_optimal = false.
Assignment solve_bb(const IlpModel& model, double time_limit_s = 60.0);

// Ordered (f, alpha) selection decoded from an assignment, slot order.
std::vector<std::pair<std::size_t, std::size_t>> decode_sequence(const IlpModel& model,
                                                                 const std::vector<std::uint8_t>& bits);

// Assignment bits realizing the given sequence.
std::vector<std::uint8_t> encode_sequence(
    const IlpModel& model, const std::vector<std::pair<std::size_t, std::size_t>>& sequence);

// Chained acquisitions for one satellite out of a solver assignment.
// Throws std::logic_error if the assignment violates the model.
std::vector<ChainedAcquisition> extract_plan(const Assignment& assignment, const IlpModel& model,
                                             const AngleGrid& grid);

struct OracleResult {
  std::vector<std::pair<std::size_t, std::size_t>> sequence;  // (f, alpha)
  double objective{0.0};
};

// Exhaustive search over request orderings; start angles follow the earliest
// angle rule and the transition mapping. Refuses clusters beyond 7 requests
// or 12 candidates per request.
OracleResult brute_force_oracle(const IlpModel& model, const AngleGrid& grid,
                                const TransitionTable& transitions);

// LP-style textual dump of variables, tagged rows, and objective terms.
std::string dump_model(const IlpModel& model);

}  // namespace orbitsched
