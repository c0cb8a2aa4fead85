#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace orbitsched {

// Fixed 4-qubit policy-head circuit: an initial RX variational layer with a
// ring of CNOTs, then 8 repetitions of [RZ feature encoding; RX variational;
// ring CNOTs], measured as <Z> on qubits 0 and 1.
struct PqcSpec {
  static constexpr int n_qubits = 4;
  static constexpr int n_reps = 8;
  static constexpr int n_params = n_qubits * (n_reps + 1);  // 36
  static constexpr int n_features = n_qubits * n_reps;      // 32
};

using Statevector = std::array<std::complex<double>, 16>;

struct PqcOutput {
  double exp_z0{0.0};
  double exp_z1{0.0};
};

// Gate primitives (qubit 0 is the least significant amplitude-index bit).
void apply_rx(Statevector& state, int qubit, double angle);
void apply_rz(Statevector& state, int qubit, double angle);
void apply_cnot(Statevector& state, int control, int target);

Statevector simulate_state(std::span<const double> params, std::span<const double> features);
PqcOutput simulate(std::span<const double> params, std::span<const double> features);

// d<Z_k>/d theta_j via the parameter-shift rule, [param][output].
std::array<std::array<double, 2>, PqcSpec::n_params> param_shift_grad(
    std::span<const double> params, std::span<const double> features);

// d<Z_k>/d x_j, same rule applied to the encoding rotations, [feature][output].
std::array<std::array<double, 2>, PqcSpec::n_features> feature_shift_grad(
    std::span<const double> params, std::span<const double> features);

}  // namespace orbitsched
