#include "orbitsched/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "orbitsched/rng.hpp"

namespace orbitsched {

namespace {

class QuboBuilder {
 public:
  explicit QuboBuilder(int n_original) : n_(n_original) {
    names_.resize(static_cast<std::size_t>(n_original));
  }

  int add_slack(const std::string& name) {
    names_.push_back(name);
    return n_++;
  }

  // Adds weight * (sum a_i v_i + c)^2.
  void add_square(const std::vector<std::pair<int, double>>& terms, double c, double weight) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto [vi, ai] = terms[i];
      quad_[{vi, vi}] += weight * (ai * ai + 2.0 * c * ai);
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        const auto [vj, aj] = terms[j];
        const auto key = std::minmax(vi, vj);
        quad_[{key.first, key.second}] += weight * 2.0 * ai * aj;
      }
    }
    offset_ += weight * c * c;
  }

  void add_linear(int v, double coeff) { quad_[{v, v}] += coeff; }
  void add_offset(double c) { offset_ += c; }

  void finish(QuboModel& out) const {
    out.n_vars = n_;
    out.var_names = names_;
    out.diag.assign(static_cast<std::size_t>(n_), 0.0);
    out.offdiag.assign(static_cast<std::size_t>(n_), {});
    for (const auto& [key, coeff] : quad_) {
      if (coeff == 0.0) continue;
      if (key.first == key.second) {
        out.diag[static_cast<std::size_t>(key.first)] = coeff;
      } else {
        out.offdiag[static_cast<std::size_t>(key.first)].emplace_back(key.second, coeff);
      }
    }
    out.offset = offset_;
  }

 private:
  int n_;
  std::vector<std::string> names_;
  std::map<std::pair<int, int>, double> quad_;
  double offset_{0.0};
};

bool is_half_trick_row(const LinearRow& r) {
  if (r.sense != RowSense::LessEqual || r.rhs != 1.0) return false;
  return std::all_of(r.terms.begin(), r.terms.end(),
                     [](const std::pair<int, double>& t) { return t.second == 1.0; });
}

}  // namespace

double choose_beta(const IlpModel& model) {
  double sum = 0.0;
  for (double j : model.weights) sum += j;
  return sum + 1.0;
}

QuboModel to_qubo(const IlpModel& model) {
  QuboModel qubo;
  qubo.n_original = model.n_vars;
  qubo.beta = choose_beta(model);
  QuboBuilder builder(model.n_vars);

  // Objective part, minimization convention.
  qubo.q0_diag.assign(static_cast<std::size_t>(model.n_vars), 0.0);
  for (std::size_t f = 0; f < model.n_requests; ++f) {
    for (std::size_t q = 0; q < model.n_slots; ++q) {
      builder.add_linear(model.x_index(f, q), -model.weights[f]);
      qubo.q0_diag[static_cast<std::size_t>(model.x_index(f, q))] = -model.weights[f];
    }
    for (std::size_t a = 0; a < model.y_counts[f]; ++a) {
      builder.add_linear(model.y_index(f, a), model.gamma[f][a]);
      qubo.q0_diag[static_cast<std::size_t>(model.y_index(f, a))] = model.gamma[f][a];
    }
  }

  double floor = 0.0;
  int slack_serial = 0;
  for (const auto& r : model.rows) {
    qubo.penalty_tags.push_back(r.tag);
    if (is_half_trick_row(r)) {
      // (sum - 1/2)^2: equal penalty 1/4 at row sums 0 and 1.
      builder.add_square(r.terms, -0.5, qubo.beta);
      floor += qubo.beta * 0.25;
      continue;
    }
    if (r.sense == RowSense::Equal) {
      builder.add_square(r.terms, -r.rhs, qubo.beta);
      continue;
    }
    // General inequality via binary slack expansion, in <= form.
    std::vector<std::pair<int, double>> terms = r.terms;
    double rhs = r.rhs;
    if (r.sense == RowSense::GreaterEqual) {
      for (auto& [v, c] : terms) c = -c;
      rhs = -rhs;
    }
    double min_lhs = 0.0;
    for (const auto& [v, c] : terms) min_lhs += std::min(0.0, c);
    const double max_slack = rhs - min_lhs;
    if (max_slack < 0.0) {
      throw std::logic_error("row " + r.tag + " is structurally infeasible");
    }
    const int bits = max_slack < 1.0
                         ? 0
                         : static_cast<int>(std::ceil(std::log2(max_slack + 1.0) - 1e-12));
    for (int i = 0; i < bits; ++i) {
      const int z = builder.add_slack("z" + std::to_string(slack_serial) + "_" + std::to_string(i));
      terms.emplace_back(z, static_cast<double>(1 << i));
    }
    ++slack_serial;
    builder.add_square(terms, -rhs, qubo.beta);
  }

  builder.finish(qubo);
  qubo.penalty_floor = floor;
  return qubo;
}

double qubo_energy(const QuboModel& qubo, const std::vector<std::uint8_t>& bits) {
  if (bits.size() != static_cast<std::size_t>(qubo.n_vars)) {
    throw std::invalid_argument("bit vector length mismatch");
  }
  double e = qubo.offset;
  for (int i = 0; i < qubo.n_vars; ++i) {
    if (!bits[static_cast<std::size_t>(i)]) continue;
    e += qubo.diag[static_cast<std::size_t>(i)];
    for (const auto& [j, c] : qubo.offdiag[static_cast<std::size_t>(i)]) {
      if (bits[static_cast<std::size_t>(j)]) e += c;
    }
  }
  return e;
}

double qubo_penalty(const QuboModel& qubo, const std::vector<std::uint8_t>& bits) {
  double q0 = 0.0;
  for (std::size_t i = 0; i < qubo.q0_diag.size(); ++i) {
    if (bits[i]) q0 += qubo.q0_diag[i];
  }
  return qubo_energy(qubo, bits) - q0;
}

AnnealResult anneal(const QuboModel& qubo, int sweeps, double t_start, double t_end,
                    std::uint64_t seed) {
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  if (!(t_start >= t_end && t_end > 0.0)) {
    throw std::invalid_argument("temperatures must satisfy t_start >= t_end > 0");
  }
  const int n = qubo.n_vars;
  AnnealResult best;
  best.bits.assign(static_cast<std::size_t>(n), 0);
  if (n == 0) {
    best.energy = qubo.offset;
    return best;
  }

  // Symmetric adjacency for O(deg) flip deltas.
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, c] : qubo.offdiag[static_cast<std::size_t>(i)]) {
      adj[static_cast<std::size_t>(i)].emplace_back(j, c);
      adj[static_cast<std::size_t>(j)].emplace_back(i, c);
    }
  }

  Rng rng(seed);
  std::vector<std::uint8_t> state(static_cast<std::size_t>(n), 0);
  double energy = qubo_energy(qubo, state);
  best.bits = state;
  best.energy = energy;

  const double ratio = t_end / t_start;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const double frac = sweeps == 1 ? 1.0 : static_cast<double>(sweep) / (sweeps - 1);
    const double temp = t_start * std::pow(ratio, frac);
    for (int i = 0; i < n; ++i) {
      double delta = qubo.diag[static_cast<std::size_t>(i)];
      for (const auto& [j, c] : adj[static_cast<std::size_t>(i)]) {
        if (state[static_cast<std::size_t>(j)]) delta += c;
      }
      if (state[static_cast<std::size_t>(i)]) delta = -delta;
      if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temp)) {
        state[static_cast<std::size_t>(i)] ^= 1;
        energy += delta;
        if (energy < best.energy) {
          best.energy = energy;
          best.bits = state;
        }
      }
    }
  }
  return best;
}

std::string export_qubo(const QuboModel& qubo) {
  std::ostringstream out;
  out << "# qubo offset " << qubo.offset << " beta " << qubo.beta << " nvars " << qubo.n_vars
      << "\n";
  for (int i = 0; i < qubo.n_vars; ++i) {
    const double d = qubo.diag[static_cast<std::size_t>(i)];
    if (d != 0.0) out << i << " " << i << " " << d << "\n";
    for (const auto& [j, c] : qubo.offdiag[static_cast<std::size_t>(i)]) {
      out << i << " " << j << " " << c << "\n";
    }
  }
  return out.str();
}

}  // namespace orbitsched
