#include "orbitsched/pqc.hpp"

#include <cmath>
#include <stdexcept>

namespace orbitsched {

namespace {
constexpr int kDim = 16;

void check_lengths(std::span<const double> params, std::span<const double> features) {
  if (params.size() != PqcSpec::n_params) {
    throw std::invalid_argument("expected 36 circuit parameters");
  }
  if (features.size() != PqcSpec::n_features) {
    throw std::invalid_argument("expected 32 encoding features");
  }
}

double expectation_z(const Statevector& state, int qubit) {
  double e = 0.0;
  for (int i = 0; i < kDim; ++i) {
    const double p = std::norm(state[static_cast<std::size_t>(i)]);
    e += ((i >> qubit) & 1) ? -p : p;
  }
  return e;
}
}  // namespace

// R_P(phi) = exp(-i phi P / 2).
void apply_rx(Statevector& state, int qubit, double angle) {
  const double c = std::cos(angle / 2.0);
  const std::complex<double> ms(0.0, -std::sin(angle / 2.0));
  const int bit = 1 << qubit;
  for (int i = 0; i < kDim; ++i) {
    if (i & bit) continue;
    const std::complex<double> a0 = state[static_cast<std::size_t>(i)];
    const std::complex<double> a1 = state[static_cast<std::size_t>(i | bit)];
    state[static_cast<std::size_t>(i)] = c * a0 + ms * a1;
    state[static_cast<std::size_t>(i | bit)] = ms * a0 + c * a1;
  }
}

void apply_rz(Statevector& state, int qubit, double angle) {
  const std::complex<double> e0 = std::exp(std::complex<double>(0.0, -angle / 2.0));
  const std::complex<double> e1 = std::exp(std::complex<double>(0.0, angle / 2.0));
  const int bit = 1 << qubit;
  for (int i = 0; i < kDim; ++i) {
    state[static_cast<std::size_t>(i)] *= (i & bit) ? e1 : e0;
  }
}

void apply_cnot(Statevector& state, int control, int target) {
  const int cbit = 1 << control;
  const int tbit = 1 << target;
  for (int i = 0; i < kDim; ++i) {
    if ((i & cbit) && !(i & tbit)) {
      std::swap(state[static_cast<std::size_t>(i)], state[static_cast<std::size_t>(i | tbit)]);
    }
  }
}

namespace {
void ring_entangle(Statevector& state) {
  for (int q = 0; q < PqcSpec::n_qubits; ++q) {
    apply_cnot(state, q, (q + 1) % PqcSpec::n_qubits);
  }
}
}  // namespace

Statevector simulate_state(std::span<const double> params, std::span<const double> features) {
  check_lengths(params, features);
  Statevector state{};
  state[0] = 1.0;  // |0000>
  for (int q = 0; q < PqcSpec::n_qubits; ++q) apply_rx(state, q, params[static_cast<std::size_t>(q)]);
  ring_entangle(state);
  for (int rep = 0; rep < PqcSpec::n_reps; ++rep) {
    for (int q = 0; q < PqcSpec::n_qubits; ++q) {
      apply_rz(state, q, features[static_cast<std::size_t>(rep * PqcSpec::n_qubits + q)]);
    }
    for (int q = 0; q < PqcSpec::n_qubits; ++q) {
      apply_rx(state, q, params[static_cast<std::size_t>((rep + 1) * PqcSpec::n_qubits + q)]);
    }
    ring_entangle(state);
  }
  return state;
}

PqcOutput simulate(std::span<const double> params, std::span<const double> features) {
  const Statevector state = simulate_state(params, features);
  return {expectation_z(state, 0), expectation_z(state, 1)};
}

std::array<std::array<double, 2>, PqcSpec::n_params> param_shift_grad(
    std::span<const double> params, std::span<const double> features) {
  check_lengths(params, features);
  std::array<std::array<double, 2>, PqcSpec::n_params> grad{};
  std::vector<double> shifted(params.begin(), params.end());
  constexpr double half_pi = 1.57079632679489661923;
  for (int j = 0; j < PqcSpec::n_params; ++j) {
    shifted[static_cast<std::size_t>(j)] = params[static_cast<std::size_t>(j)] + half_pi;
    const PqcOutput plus = simulate(shifted, features);
    shifted[static_cast<std::size_t>(j)] = params[static_cast<std::size_t>(j)] - half_pi;
    const PqcOutput minus = simulate(shifted, features);
    shifted[static_cast<std::size_t>(j)] = params[static_cast<std::size_t>(j)];
    grad[static_cast<std::size_t>(j)][0] = (plus.exp_z0 - minus.exp_z0) / 2.0;
    grad[static_cast<std::size_t>(j)][1] = (plus.exp_z1 - minus.exp_z1) / 2.0;
  }
  return grad;
}

std::array<std::array<double, 2>, PqcSpec::n_features> feature_shift_grad(
    std::span<const double> params, std::span<const double> features) {
  check_lengths(params, features);
  std::array<std::array<double, 2>, PqcSpec::n_features> grad{};
  std::vector<double> shifted(features.begin(), features.end());
  constexpr double half_pi = 1.57079632679489661923;
  for (int j = 0; j < PqcSpec::n_features; ++j) {
    shifted[static_cast<std::size_t>(j)] = features[static_cast<std::size_t>(j)] + half_pi;
    const PqcOutput plus = simulate(params, shifted);
    shifted[static_cast<std::size_t>(j)] = features[static_cast<std::size_t>(j)] - half_pi;
    const PqcOutput minus = simulate(params, shifted);
    shifted[static_cast<std::size_t>(j)] = features[static_cast<std::size_t>(j)];
    grad[static_cast<std::size_t>(j)][0] = (plus.exp_z0 - minus.exp_z0) / 2.0;
    grad[static_cast<std::size_t>(j)][1] = (plus.exp_z1 - minus.exp_z1) / 2.0;
  }
  return grad;
}

}  // namespace orbitsched
