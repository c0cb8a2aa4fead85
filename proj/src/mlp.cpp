#include "orbitsched/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "orbitsched/rng.hpp"

namespace orbitsched {

Mlp Mlp::make(const std::vector<int>& layer_sizes, Rng& rng) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("network needs >= 2 layer sizes");
  Mlp net = zeros(layer_sizes);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& x : net.w[l]) x = rng.uniform(-bound, bound);
  }
  return net;
}

Mlp Mlp::zeros(const std::vector<int>& layer_sizes) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("network needs >= 2 layer sizes");
  Mlp net;
  net.sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    net.w.emplace_back(static_cast<std::size_t>(layer_sizes[l]) *
                           static_cast<std::size_t>(layer_sizes[l + 1]),
                       0.0);
    net.b.emplace_back(static_cast<std::size_t>(layer_sizes[l + 1]), 0.0);
  }
  return net;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w.size(); ++l) n += w[l].size() + b[l].size();
  return n;
}

void Mlp::fill(double value) {
  for (auto& layer : w) std::fill(layer.begin(), layer.end(), value);
  for (auto& layer : b) std::fill(layer.begin(), layer.end(), value);
}

void Mlp::append_params(std::vector<double>& out) const {
  for (std::size_t l = 0; l < w.size(); ++l) {
    out.insert(out.end(), w[l].begin(), w[l].end());
    out.insert(out.end(), b[l].begin(), b[l].end());
  }
}

const double* Mlp::read_params(const double* it) {
  for (std::size_t l = 0; l < w.size(); ++l) {
    for (double& x : w[l]) x = *it++;
    for (double& x : b[l]) x = *it++;
  }
  return it;
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x, MlpCache* cache) {
  if (x.size() != static_cast<std::size_t>(net.sizes.front())) {
    throw std::invalid_argument("input width mismatch");
  }
  std::vector<double> cur(x.begin(), x.end());
  if (cache != nullptr) {
    cache->act.clear();
    cache->act.push_back(cur);
  }
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    const int n_in = net.sizes[l];
    const int n_out = net.sizes[l + 1];
    std::vector<double> next(static_cast<std::size_t>(n_out));
    const double* wl = net.w[l].data();
    for (int o = 0; o < n_out; ++o) {
      double s = net.b[l][static_cast<std::size_t>(o)];
      const double* row = wl + static_cast<std::size_t>(o) * static_cast<std::size_t>(n_in);
      for (int i = 0; i < n_in; ++i) s += row[i] * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = l + 1 < net.w.size() ? std::tanh(s) : s;
    }
    cur = std::move(next);
    if (cache != nullptr) cache->act.push_back(cur);
  }
  return cur;
}

std::vector<double> mlp_backward(const Mlp& net, const MlpCache& cache,
                                 std::span<const double> dy, Mlp& grads) {
  if (cache.act.size() != net.w.size() + 1) throw std::invalid_argument("stale forward cache");
  std::vector<double> delta(dy.begin(), dy.end());
  for (std::size_t li = net.w.size(); li-- > 0;) {
    const int n_in = net.sizes[li];
    const int n_out = net.sizes[li + 1];
    const std::vector<double>& a_in = cache.act[li];
    if (li + 1 < net.w.size()) {  // undo tanh on this layer's output
      const std::vector<double>& a_out = cache.act[li + 1];
      for (int o = 0; o < n_out; ++o) {
        delta[static_cast<std::size_t>(o)] *=
            1.0 - a_out[static_cast<std::size_t>(o)] * a_out[static_cast<std::size_t>(o)];
      }
    }
    std::vector<double> dx(static_cast<std::size_t>(n_in), 0.0);
    const double* wl = net.w[li].data();
    double* gl = grads.w[li].data();
    for (int o = 0; o < n_out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      grads.b[li][static_cast<std::size_t>(o)] += d;
      const std::size_t base = static_cast<std::size_t>(o) * static_cast<std::size_t>(n_in);
      for (int i = 0; i < n_in; ++i) {
        gl[base + static_cast<std::size_t>(i)] += d * a_in[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(i)] += wl[base + static_cast<std::size_t>(i)] * d;
      }
    }
    delta = std::move(dx);
  }
  return delta;
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads, double lr) {
  if (params.size() != grads.size()) throw std::invalid_argument("grad size mismatch");
  if (m.empty()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  ++t;
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
    params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
  }
}

}  // namespace orbitsched
