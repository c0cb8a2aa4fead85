#include "orbitsched/ilp.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace orbitsched {

AngleGrid build_angle_grid(const std::vector<const AcquisitionRequest*>& cluster,
                           const std::vector<EphemerisRecord>& ephemeris, std::int64_t step_s) {
  if (step_s < 1) throw std::invalid_argument("step_s must be >= 1");
  AngleGrid grid;
  for (const AcquisitionRequest* req : cluster) {
    GridRequest gr;
    gr.request = req;
    gr.tau_ms = req->acquisition_ms();
    const std::int64_t latest = req->dto_end_ms - gr.tau_ms;
    for (std::int64_t t = req->dto_start_ms; t <= latest; t += step_s * 1000) {
      AngleCandidate c;
      c.start_ms = t;
      c.start_attitude = attitude_pointing(interpolate_state(ephemeris, t), req->median_start, t);
      const std::int64_t t_end = t + gr.tau_ms;
      c.end_attitude =
          attitude_pointing(interpolate_state(ephemeris, t_end), req->median_end, t_end);
      gr.candidates.push_back(c);
    }
    if (gr.candidates.empty()) {
      grid.excluded_request_ids.push_back(req->request_id);
    } else {
      grid.requests.push_back(std::move(gr));
    }
  }
  return grid;
}

bool TransitionTable::in_l(std::size_t f1, std::size_t f2) const {
  const auto it = mapping.find({f1, f2});
  if (it == mapping.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [](int a) { return a >= 0; });
}

TransitionTable build_transitions(const AngleGrid& grid,
                                  const std::vector<EphemerisRecord>& ephemeris) {
  TransitionTable table;
  const std::size_t n = grid.requests.size();
  for (std::size_t f1 = 0; f1 < n; ++f1) {
    for (std::size_t f2 = 0; f2 < n; ++f2) {
      if (f1 == f2) continue;
      const GridRequest& a = grid.requests[f1];
      const GridRequest& b = grid.requests[f2];
      std::vector<int> map_row(a.candidates.size(), -1);
      for (std::size_t alpha = 0; alpha < a.candidates.size(); ++alpha) {
        const std::int64_t t_end = a.candidates[alpha].start_ms + a.tau_ms;
        const auto d = min_relay_time(t_end, a.request->geometry(), b.request->geometry(), ephemeris);
        if (!d.has_value()) continue;
        const std::int64_t arrival = t_end + *d * 1000;
        // Snap up to the next grid candidate of f2 (never earlier).
        const auto it = std::lower_bound(
            b.candidates.begin(), b.candidates.end(), arrival,
            [](const AngleCandidate& c, std::int64_t t) { return c.start_ms < t; });
        if (it == b.candidates.end()) continue;
        map_row[alpha] = static_cast<int>(it - b.candidates.begin());
      }
      if (std::any_of(map_row.begin(), map_row.end(), [](int v) { return v >= 0; })) {
        table.mapping[{f1, f2}] = std::move(map_row);
      }
    }
  }
  return table;
}

std::vector<double> priority_weights(const std::vector<const AcquisitionRequest*>& cluster) {
  std::vector<double> weights(cluster.size(), 1.0);
  // Count requests per priority class in this cluster.
  std::array<int, 5> count{};
  for (const auto* r : cluster) count[static_cast<std::size_t>(r->priority)] += 1;
  // Weight per class, walking from the lowest priority (4) upwards.
  std::array<double, 5> class_weight{};
  double sum_lower = 0.0;
  for (int p = 4; p >= 1; --p) {
    if (count[static_cast<std::size_t>(p)] == 0) continue;
    class_weight[static_cast<std::size_t>(p)] = (sum_lower == 0.0) ? 1.0 : sum_lower + 1.0;
    sum_lower += class_weight[static_cast<std::size_t>(p)] * count[static_cast<std::size_t>(p)];
  }
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    weights[i] = class_weight[static_cast<std::size_t>(cluster[i]->priority)];
  }
  return weights;
}

int IlpModel::x_index(std::size_t f, std::size_t q) const {
  return static_cast<int>(f * n_slots + q);
}

int IlpModel::y_index(std::size_t f, std::size_t alpha) const {
  return static_cast<int>(n_requests * n_slots + y_offsets[f] + alpha);
}

int IlpModel::kappa_index(std::size_t f1, std::size_t f2) const {
  if (f1 == f2) return -1;
  std::size_t y_total = y_offsets.empty() ? 0 : y_offsets.back() + y_counts.back();
  std::size_t pair_pos = f1 * (n_requests - 1) + (f2 > f1 ? f2 - 1 : f2);
  return static_cast<int>(n_requests * n_slots + y_total + pair_pos);
}

IlpModel build_model(const AngleGrid& grid, const TransitionTable& transitions) {
  IlpModel m;
  const std::size_t F = grid.requests.size();
  m.n_requests = F;
  m.n_slots = F;  // an upper bound on completions
  if (F == 0) return m;

  std::vector<const AcquisitionRequest*> cluster;
  for (const auto& gr : grid.requests) cluster.push_back(gr.request);
  m.weights = priority_weights(cluster);

  m.y_offsets.resize(F);
  m.y_counts.resize(F);
  std::size_t y_total = 0;
  for (std::size_t f = 0; f < F; ++f) {
    m.y_offsets[f] = y_total;
    m.y_counts[f] = grid.requests[f].candidates.size();
    y_total += m.y_counts[f];
  }
  m.n_vars = static_cast<int>(F * m.n_slots + y_total + F * (F - 1));

  m.var_names.resize(static_cast<std::size_t>(m.n_vars));
  m.objective.assign(static_cast<std::size_t>(m.n_vars), 0.0);
  m.gamma.resize(F);

  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t q = 0; q < m.n_slots; ++q) {
      const int v = m.x_index(f, q);
      m.var_names[static_cast<std::size_t>(v)] =
          "x[" + std::to_string(f) + "," + std::to_string(q) + "]";
      m.objective[static_cast<std::size_t>(v)] = m.weights[f];
    }
    const GridRequest& gr = grid.requests[f];
    // Window-relative seconds keep gamma within [0, 1/Q].
    const double denom_s =
        static_cast<double>(gr.request->dto_end_ms - gr.request->dto_start_ms - gr.tau_ms) / 1000.0;
    m.gamma[f].resize(gr.candidates.size());
    for (std::size_t a = 0; a < gr.candidates.size(); ++a) {
      const double rel_s =
          static_cast<double>(gr.candidates[a].start_ms - gr.request->dto_start_ms) / 1000.0;
      const double g =
          denom_s <= 0.0 ? 0.0 : rel_s / (static_cast<double>(m.n_slots) * denom_s);
      m.gamma[f][a] = g;
      const int v = m.y_index(f, a);
      m.var_names[static_cast<std::size_t>(v)] =
          "y[" + std::to_string(f) + "," + std::to_string(a) + "]";
      m.objective[static_cast<std::size_t>(v)] = -g;
    }
  }
  for (std::size_t f1 = 0; f1 < F; ++f1) {
    for (std::size_t f2 = 0; f2 < F; ++f2) {
      if (f1 == f2) continue;
      m.var_names[static_cast<std::size_t>(m.kappa_index(f1, f2))] =
          "k[" + std::to_string(f1) + "," + std::to_string(f2) + "]";
    }
  }

  auto row = [&m](std::string tag, std::vector<std::pair<int, double>> terms, RowSense sense,
                  double rhs) {
    m.rows.push_back({std::move(tag), std::move(terms), sense, rhs});
  };

  // eq7: each request in at most one slot; eq8: each slot holds at most one.
  for (std::size_t f = 0; f < F; ++f) {
    std::vector<std::pair<int, double>> t;
    for (std::size_t q = 0; q < m.n_slots; ++q) t.emplace_back(m.x_index(f, q), 1.0);
    row("eq7", std::move(t), RowSense::LessEqual, 1.0);
  }
  for (std::size_t q = 0; q < m.n_slots; ++q) {
    std::vector<std::pair<int, double>> t;
    for (std::size_t f = 0; f < F; ++f) t.emplace_back(m.x_index(f, q), 1.0);
    row("eq8", std::move(t), RowSense::LessEqual, 1.0);
  }
  // eq9: a completed request starts with exactly one angle.
  for (std::size_t f = 0; f < F; ++f) {
    std::vector<std::pair<int, double>> t;
    for (std::size_t a = 0; a < m.y_counts[f]; ++a) t.emplace_back(m.y_index(f, a), 1.0);
    for (std::size_t q = 0; q < m.n_slots; ++q) t.emplace_back(m.x_index(f, q), -1.0);
    row("eq9", std::move(t), RowSense::Equal, 0.0);
  }
  // eq10: no empty slots in line.
  for (std::size_t q = 1; q < m.n_slots; ++q) {
    std::vector<std::pair<int, double>> t;
    for (std::size_t f = 0; f < F; ++f) t.emplace_back(m.x_index(f, q - 1), 1.0);
    for (std::size_t f = 0; f < F; ++f) t.emplace_back(m.x_index(f, q), -1.0);
    row("eq10", std::move(t), RowSense::GreaterEqual, 0.0);
  }
  // eq11: consecutive slots force kappa.
  for (std::size_t f1 = 0; f1 < F; ++f1) {
    for (std::size_t f2 = 0; f2 < F; ++f2) {
      if (f1 == f2) continue;
      for (std::size_t q = 1; q < m.n_slots; ++q) {
        row("eq11",
            {{m.kappa_index(f1, f2), 1.0},
             {m.x_index(f1, q - 1), -1.0},
             {m.x_index(f2, q), -1.0}},
            RowSense::GreaterEqual, -1.0);
      }
    }
  }
  // eq12/eq13: each request has at most one successor and one predecessor.
  for (std::size_t f2 = 0; f2 < F; ++f2) {
    std::vector<std::pair<int, double>> t;
    for (std::size_t f1 = 0; f1 < F; ++f1) {
      if (f1 != f2) t.emplace_back(m.kappa_index(f1, f2), 1.0);
    }
    row("eq12", std::move(t), RowSense::LessEqual, 1.0);
  }
  for (std::size_t f1 = 0; f1 < F; ++f1) {
    std::vector<std::pair<int, double>> t;
    for (std::size_t f2 = 0; f2 < F; ++f2) {
      if (f1 != f2) t.emplace_back(m.kappa_index(f1, f2), 1.0);
    }
    row("eq13", std::move(t), RowSense::LessEqual, 1.0);
  }
  // eq14/eq15: a linked pair was completed in some order.
  for (std::size_t f1 = 0; f1 < F; ++f1) {
    for (std::size_t f2 = 0; f2 < F; ++f2) {
      if (f1 == f2) continue;
      std::vector<std::pair<int, double>> t14{{m.kappa_index(f1, f2), 1.0}};
      for (std::size_t q = 1; q < m.n_slots; ++q) t14.emplace_back(m.x_index(f2, q), -1.0);
      row("eq14", std::move(t14), RowSense::LessEqual, 0.0);
      std::vector<std::pair<int, double>> t15{{m.kappa_index(f1, f2), 1.0}};
      for (std::size_t q = 0; q + 1 < m.n_slots; ++q) t15.emplace_back(m.x_index(f1, q), -1.0);
      row("eq15", std::move(t15), RowSense::LessEqual, 0.0);
    }
  }
  // eq16: the successor's start angle follows the transition mapping.
  // eq17: a transition needs a compatible initial angle.
  for (const auto& [pair, map_row] : transitions.mapping) {
    const auto [f1, f2] = pair;
    const int kappa = m.kappa_index(f1, f2);
    std::vector<std::pair<int, double>> t17{{kappa, -1.0}};
    bool any = false;
    for (std::size_t a1 = 0; a1 < map_row.size(); ++a1) {
      if (map_row[a1] < 0) continue;
      any = true;
      t17.emplace_back(m.y_index(f1, a1), 1.0);
      row("eq16",
          {{m.y_index(f2, static_cast<std::size_t>(map_row[a1])), 1.0},
           {kappa, -1.0},
           {m.y_index(f1, a1), -1.0}},
          RowSense::GreaterEqual, -1.0);
    }
    if (any) row("eq17", std::move(t17), RowSense::GreaterEqual, 0.0);
  }
  // eq18: impossible transitions are forbidden.
  for (std::size_t f1 = 0; f1 < F; ++f1) {
    for (std::size_t f2 = 0; f2 < F; ++f2) {
      if (f1 == f2) continue;
      if (!transitions.in_l(f1, f2)) {
        row("eq18", {{m.kappa_index(f1, f2), 1.0}}, RowSense::Equal, 0.0);
      }
    }
  }
  // eq19: the first request in the queue starts at its earliest angle.
  for (std::size_t f = 0; f < F; ++f) {
    row("eq19", {{m.y_index(f, 0), 1.0}, {m.x_index(f, 0), -1.0}}, RowSense::GreaterEqual, 0.0);
  }
  return m;
}

double evaluate_assignment(const IlpModel& model, const std::vector<std::uint8_t>& bits) {
  double obj = 0.0;
  for (std::size_t f = 0; f < model.n_requests; ++f) {
    for (std::size_t q = 0; q < model.n_slots; ++q) {
      if (bits[static_cast<std::size_t>(model.x_index(f, q))]) obj += model.weights[f];
    }
    for (std::size_t a = 0; a < model.y_counts[f]; ++a) {
      if (bits[static_cast<std::size_t>(model.y_index(f, a))]) obj -= model.gamma[f][a];
    }
  }
  return obj;
}

bool assignment_satisfies(const IlpModel& model, const std::vector<std::uint8_t>& bits,
                          std::string* first_violated_tag) {
  for (const auto& r : model.rows) {
    double lhs = 0.0;
    for (const auto& [v, c] : r.terms) lhs += c * bits[static_cast<std::size_t>(v)];
    const bool ok = (r.sense == RowSense::LessEqual && lhs <= r.rhs + 1e-9) ||
                    (r.sense == RowSense::GreaterEqual && lhs >= r.rhs - 1e-9) ||
                    (r.sense == RowSense::Equal && std::abs(lhs - r.rhs) < 1e-9);
    if (!ok) {
      if (first_violated_tag != nullptr) *first_violated_tag = r.tag;
      return false;
    }
  }
  return true;
}

namespace {

struct BbState {
  const IlpModel* model;
  std::vector<int> order;        // static branch order
  std::vector<std::uint8_t> best_bits;
  double best_obj{0.0};
  std::size_t node_count{0};
  bool timed_out{false};
  std::chrono::steady_clock::time_point deadline;

  bool check_time() {
    if ((++node_count & 1023) == 0 && std::chrono::steady_clock::now() > deadline) {
      timed_out = true;
    }
    return timed_out;
  }
};

// Propagate forced values; returns false on conflict.
bool propagate(const IlpModel& m, std::vector<std::int8_t>& val) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : m.rows) {
      double lo = 0.0;
      double hi = 0.0;
      for (const auto& [v, c] : r.terms) {
        const std::int8_t x = val[static_cast<std::size_t>(v)];
        if (x >= 0) {
          lo += c * x;
          hi += c * x;
        } else if (c > 0) {
          hi += c;
        } else {
          lo += c;
        }
      }
      const bool need_le = r.sense != RowSense::GreaterEqual;
      const bool need_ge = r.sense != RowSense::LessEqual;
      if (need_le && lo > r.rhs + 1e-9) return false;
      if (need_ge && hi < r.rhs - 1e-9) return false;
      for (const auto& [v, c] : r.terms) {
        std::int8_t& x = val[static_cast<std::size_t>(v)];
        if (x >= 0) continue;
        if (need_le && c > 0 && lo + c > r.rhs + 1e-9) {
          x = 0;
          changed = true;
        } else if (need_le && c < 0 && lo - c > r.rhs + 1e-9) {
          x = 1;
          changed = true;
        } else if (need_ge && c > 0 && hi - c < r.rhs - 1e-9) {
          x = 1;
          changed = true;
        } else if (need_ge && c < 0 && hi + c < r.rhs - 1e-9) {
          x = 0;
          changed = true;
        }
      }
    }
  }
  return true;
}

double upper_bound(const IlpModel& m, const std::vector<std::int8_t>& val) {
  double ub = 0.0;
  for (std::size_t f = 0; f < m.n_requests; ++f) {
    bool possible = false;
    for (std::size_t q = 0; q < m.n_slots; ++q) {
      if (val[static_cast<std::size_t>(m.x_index(f, q))] != 0) {
        possible = true;
        break;
      }
    }
    if (possible) ub += m.weights[f];
    for (std::size_t a = 0; a < m.y_counts[f]; ++a) {
      if (val[static_cast<std::size_t>(m.y_index(f, a))] == 1) ub -= m.gamma[f][a];
    }
  }
  return ub;
}

void bb_search(BbState& st, std::vector<std::int8_t> val) {
  if (st.check_time()) return;
  if (!propagate(*st.model, val)) return;
  if (upper_bound(*st.model, val) <= st.best_obj + 1e-12) return;

  int branch_var = -1;
  for (int v : st.order) {
    if (val[static_cast<std::size_t>(v)] < 0) {
      branch_var = v;
      break;
    }
  }
  if (branch_var < 0) {
    std::vector<std::uint8_t> bits(val.begin(), val.end());
    if (!assignment_satisfies(*st.model, bits)) return;
    const double obj = evaluate_assignment(*st.model, bits);
    if (obj > st.best_obj + 1e-12) {
      st.best_obj = obj;
      st.best_bits = std::move(bits);
    }
    return;
  }
  {
    std::vector<std::int8_t> v1 = val;
    v1[static_cast<std::size_t>(branch_var)] = 1;
    bb_search(st, std::move(v1));
  }
  val[static_cast<std::size_t>(branch_var)] = 0;
  bb_search(st, std::move(val));
}

}  // namespace

Assignment solve_bb(const IlpModel& model, double time_limit_s) {
  Assignment result;
  result.bits.assign(static_cast<std::size_t>(model.n_vars), 0);
  result.objective = 0.0;  // the all-zero assignment is always feasible
  if (model.n_vars == 0) return result;

  BbState st;
  st.model = &model;
  st.best_bits = result.bits;
  st.best_obj = 0.0;
  st.deadline = std::chrono::steady_clock::now() +
                std::chrono::milliseconds(static_cast<std::int64_t>(time_limit_s * 1000.0));

  // Branch on x slot-major (heaviest weight first), then kappa, then y.
  for (std::size_t q = 0; q < model.n_slots; ++q) {
    std::vector<std::size_t> fs(model.n_requests);
    for (std::size_t f = 0; f < fs.size(); ++f) fs[f] = f;
    std::sort(fs.begin(), fs.end(), [&model](std::size_t a, std::size_t b) {
      if (model.weights[a] != model.weights[b]) return model.weights[a] > model.weights[b];
      return a < b;
    });
    for (std::size_t f : fs) st.order.push_back(model.x_index(f, q));
  }
  for (std::size_t f1 = 0; f1 < model.n_requests; ++f1) {
    for (std::size_t f2 = 0; f2 < model.n_requests; ++f2) {
      if (f1 != f2) st.order.push_back(model.kappa_index(f1, f2));
    }
  }
  for (std::size_t f = 0; f < model.n_requests; ++f) {
    for (std::size_t a = 0; a < model.y_counts[f]; ++a) st.order.push_back(model.y_index(f, a));
  }

  std::vector<std::int8_t> val(static_cast<std::size_t>(model.n_vars), -1);
  bb_search(st, std::move(val));

  result.bits = st.best_bits;
  result.objective = st.best_obj;
  result.proven_optimal = !st.timed_out;
  return result;
}

std::vector<std::pair<std::size_t, std::size_t>> decode_sequence(
    const IlpModel& model, const std::vector<std::uint8_t>& bits) {
  std::vector<std::pair<std::size_t, std::size_t>> seq;
  for (std::size_t q = 0; q < model.n_slots; ++q) {
    for (std::size_t f = 0; f < model.n_requests; ++f) {
      if (!bits[static_cast<std::size_t>(model.x_index(f, q))]) continue;
      std::size_t alpha = model.y_counts[f];
      for (std::size_t a = 0; a < model.y_counts[f]; ++a) {
        if (bits[static_cast<std::size_t>(model.y_index(f, a))]) {
          alpha = a;
          break;
        }
      }
      seq.emplace_back(f, alpha);
    }
  }
  return seq;
}

std::vector<std::uint8_t> encode_sequence(
    const IlpModel& model, const std::vector<std::pair<std::size_t, std::size_t>>& sequence) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(model.n_vars), 0);
  for (std::size_t q = 0; q < sequence.size(); ++q) {
    const auto [f, alpha] = sequence[q];
    bits[static_cast<std::size_t>(model.x_index(f, q))] = 1;
    bits[static_cast<std::size_t>(model.y_index(f, alpha))] = 1;
    if (q > 0) {
      bits[static_cast<std::size_t>(model.kappa_index(sequence[q - 1].first, f))] = 1;
    }
  }
  return bits;
}

std::vector<ChainedAcquisition> extract_plan(const Assignment& assignment, const IlpModel& model,
                                             const AngleGrid& grid) {
  std::string tag;
  if (!assignment_satisfies(model, assignment.bits, &tag)) {
    throw std::logic_error("assignment violates model row " + tag);
  }
  std::vector<ChainedAcquisition> out;
  const auto seq = decode_sequence(model, assignment.bits);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto [f, alpha] = seq[i];
    if (alpha >= model.y_counts[f]) throw std::logic_error("scheduled request without start angle");
    const GridRequest& gr = grid.requests[f];
    const AngleCandidate& cand = gr.candidates[alpha];
    ChainedAcquisition a;
    a.request_id = gr.request->request_id;
    a.acquisition_start_ms = cand.start_ms;
    a.acquisition_duration_ms = gr.tau_ms;
    a.start_attitude = cand.start_attitude;
    a.end_attitude = cand.end_attitude;
    if (i == 0) {
      a.relay_duration_s_from_previous = maneuver_duration_s(Attitude{}, cand.start_attitude);
    } else {
      const auto [pf, pa] = seq[i - 1];
      const std::int64_t prev_end =
          grid.requests[pf].candidates[pa].start_ms + grid.requests[pf].tau_ms;
      a.relay_duration_s_from_previous = (cand.start_ms - prev_end) / 1000;
    }
    out.push_back(a);
  }
  return out;
}

OracleResult brute_force_oracle(const IlpModel& model, const AngleGrid& grid,
                                const TransitionTable& transitions) {
  if (model.n_requests > 7) throw std::invalid_argument("oracle limited to 7 requests");
  for (const auto& gr : grid.requests) {
    if (gr.candidates.size() > 12) {
      throw std::invalid_argument("oracle limited to 12 candidates per request");
    }
  }
  OracleResult best;  // empty plan, objective 0
  std::vector<std::pair<std::size_t, std::size_t>> seq;
  std::vector<bool> used(model.n_requests, false);

  auto consider = [&]() {
    const double obj = evaluate_assignment(model, encode_sequence(model, seq));
    if (obj > best.objective) {
      best.objective = obj;
      best.sequence = seq;
    }
  };

  std::function<void()> extend = [&]() {
    consider();
    if (seq.size() == model.n_requests) return;
    for (std::size_t f2 = 0; f2 < model.n_requests; ++f2) {
      if (used[f2]) continue;
      std::size_t alpha2;
      if (seq.empty()) {
        alpha2 = 0;  // earliest angle rule for the head of the queue
      } else {
        const auto [f1, a1] = seq.back();
        const auto it = transitions.mapping.find({f1, f2});
        if (it == transitions.mapping.end() || it->second[a1] < 0) continue;
        alpha2 = static_cast<std::size_t>(it->second[a1]);
      }
      used[f2] = true;
      seq.emplace_back(f2, alpha2);
      extend();
      seq.pop_back();
      used[f2] = false;
    }
  };
  extend();
  return best;
}

std::string dump_model(const IlpModel& model) {
  std::ostringstream out;
  out << "vars " << model.n_vars << "\n";
  for (int v = 0; v < model.n_vars; ++v) {
    out << "  " << model.var_names[static_cast<std::size_t>(v)] << " bin\n";
  }
  out << "maximize";
  for (int v = 0; v < model.n_vars; ++v) {
    const double c = model.objective[static_cast<std::size_t>(v)];
    if (c != 0.0) out << " " << (c > 0 ? "+" : "") << c << " " << model.var_names[static_cast<std::size_t>(v)];
  }
  out << "\n";
  for (const auto& r : model.rows) {
    out << r.tag << ":";
    for (const auto& [v, c] : r.terms) {
      out << " " << (c > 0 ? "+" : "") << c << " " << model.var_names[static_cast<std::size_t>(v)];
    }
    out << (r.sense == RowSense::LessEqual ? " <= "
            : r.sense == RowSense::GreaterEqual ? " >= "
                                                : " = ")
        << r.rhs << "\n";
  }
  return out.str();
}

}  // namespace orbitsched
