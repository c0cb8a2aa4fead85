#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbitsched/ilp.hpp"

namespace orbitsched {

struct QuboModel {
  // Original model bits first, then slack bits.
  int n_vars{0};
  int n_original{0};
  std::vector<std::string> var_names;
  // Upper-triangular coefficients: diag[i]*b_i + sum_{i<j} offdiag[{i,j}] b_i b_j + offset.
  std::vector<double> diag;
  std::vector<std::vector<std::pair<int, double>>> offdiag;  // per i, entries (j > i, coeff)
  double offset{0.0};
  double beta{1.0};
  // Minimum attainable value of the beta-scaled penalty block; an assignment
  // is feasible iff its penalty part lands exactly on this floor.
  double penalty_floor{0.0};
  std::vector<std::string> penalty_tags;  // one per compiled penalty block
  // Diagonal of the (linear) objective part Q_0, original bits only.
  std::vector<double> q0_diag;
};

double choose_beta(const IlpModel& model);

// Compiles every constraint family to a tagged quadratic penalty:
// <=1 rows via the squared-half trick, equalities squared directly, general
// inequalities via binary slack expansion. Objective follows the minimization
// convention (negated).
QuboModel to_qubo(const IlpModel& model);

double qubo_energy(const QuboModel& qubo, const std::vector<std::uint8_t>& bits);

// Penalty part only (beta-scaled); equals penalty_floor iff feasible.
double qubo_penalty(const QuboModel& qubo, const std::vector<std::uint8_t>& bits);

struct AnnealResult {
  std::vector<std::uint8_t> bits;
  double energy{0.0};
};

// Single-spin-flip Metropolis with a geometric temperature schedule.
AnnealResult anneal(const QuboModel& qubo, int sweeps, double t_start, double t_end,
                    std::uint64_t seed);

// Coordinate-list export: header with offset and beta, then "i j coeff" lines.
std::string export_qubo(const QuboModel& qubo);

}  // namespace orbitsched
