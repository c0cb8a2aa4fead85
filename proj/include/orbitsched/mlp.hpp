#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace orbitsched {

class Rng;

// Fully-connected network, tanh hidden activations, linear output layer.
struct Mlp {
  std::vector<int> sizes;                 // layer widths, input first
  std::vector<std::vector<double>> w;     // per layer, row-major [out x in]
  std::vector<std::vector<double>> b;     // per layer, [out]

  static Mlp make(const std::vector<int>& layer_sizes, Rng& rng);  // Xavier-uniform
  static Mlp zeros(const std::vector<int>& layer_sizes);

  std::size_t param_count() const;
  void fill(double value);
  void append_params(std::vector<double>& out) const;
  const double* read_params(const double* it);  // consumes param_count() doubles
};

struct MlpCache {
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = layer l output
};

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x,
                                MlpCache* cache = nullptr);

// Accumulates dL/dw, dL/db into `grads` (same shape as `net`); returns dL/dx.
std::vector<double> mlp_backward(const Mlp& net, const MlpCache& cache,
                                 std::span<const double> dy, Mlp& grads);

struct Adam {
  double beta1{0.9};
  double beta2{0.999};
  double eps{1e-8};
  int t{0};
  std::vector<double> m;
  std::vector<double> v;

  void step(std::vector<double>& params, const std::vector<double>& grads, double lr);
};

}  // namespace orbitsched
