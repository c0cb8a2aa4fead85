#include "orbitsched/rl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "orbitsched/rng.hpp"

namespace orbitsched {

namespace {

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Softmax restricted to `legal`; probabilities for other actions are zero.
void masked_softmax(const std::vector<double>& logits, const std::vector<int>& legal,
                    std::vector<double>& probs) {
  probs.assign(logits.size(), 0.0);
  if (legal.empty()) return;
  double hi = -std::numeric_limits<double>::infinity();
  for (int a : legal) hi = std::max(hi, logits[static_cast<std::size_t>(a)]);
  double z = 0.0;
  for (int a : legal) {
    const double e = std::exp(logits[static_cast<std::size_t>(a)] - hi);
    probs[static_cast<std::size_t>(a)] = e;
    z += e;
  }
  for (int a : legal) probs[static_cast<std::size_t>(a)] /= z;
}

int sample_from(const std::vector<double>& probs, const std::vector<int>& support, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int a : support) {
    acc += probs[static_cast<std::size_t>(a)];
    if (u < acc) return a;
  }
  return support.back();
}

}  // namespace

// ---------------------------------------------------------------------------
// SatCentricEnv
// ---------------------------------------------------------------------------

SatCentricEnv::SatCentricEnv(std::string satellite_id,
                             std::vector<const AcquisitionRequest*> requests,
                             const std::vector<EphemerisRecord>* ephemeris,
                             std::int64_t horizon_start_ms, std::int64_t horizon_end_ms,
                             int max_steps) {
  if (ephemeris == nullptr || ephemeris->empty()) {
    throw std::invalid_argument("satellite environment needs an ephemeris");
  }
  if (horizon_end_ms <= horizon_start_ms) {
    throw std::invalid_argument("empty scheduling horizon");
  }
  auto setup = std::make_shared<Setup>();
  setup->satellite_id = std::move(satellite_id);
  setup->requests = std::move(requests);
  std::sort(setup->requests.begin(), setup->requests.end(),
            [](const AcquisitionRequest* a, const AcquisitionRequest* b) {
              if (a->dto_start_ms != b->dto_start_ms) return a->dto_start_ms < b->dto_start_ms;
              return a->request_id < b->request_id;
            });
  for (const AcquisitionRequest* r : setup->requests) setup->tau_ms.push_back(r->acquisition_ms());
  setup->ephemeris = ephemeris;
  setup->horizon_start_ms = horizon_start_ms;
  setup->horizon_end_ms = horizon_end_ms;
  setup->max_steps = max_steps;
  setup_ = std::move(setup);
  reset();
}

void SatCentricEnv::reset() {
  now_ms_ = std::max(setup_->ephemeris->front().timestamp_ms, setup_->horizon_start_ms);
  attitude_ = Attitude{};
  first_ = true;
  completed_.assign(setup_->requests.size(), 0);
  acquisitions_.clear();
  last_start_ = GeoPoint{0.0, 0.0};
  total_reward_ = 0.0;
  steps_ = 0;
  done_ = false;
  fast_forward();
  refill_slots();
}

void SatCentricEnv::fast_forward() {
  if (steps_ >= setup_->max_steps) {
    done_ = true;
    return;
  }
  bool any_open = false;
  std::int64_t next_open = std::numeric_limits<std::int64_t>::max();
  bool any_viable = false;
  for (std::size_t i = 0; i < setup_->requests.size(); ++i) {
    if (completed_[i]) continue;
    const AcquisitionRequest* r = setup_->requests[i];
    const std::int64_t latest = r->dto_end_ms - setup_->tau_ms[i];
    if (latest < now_ms_) continue;  // window already gone
    any_viable = true;
    if (r->dto_start_ms <= now_ms_) {
      any_open = true;
    } else {
      next_open = std::min(next_open, r->dto_start_ms);
    }
  }
  if (!any_viable) {
    done_ = true;
    return;
  }
  // Idle time carries no decisions; jump ahead, but stay on the whole-second
  // grid anchored at the previous acquisition end so relays remain valid.
  if (!any_open) now_ms_ += (next_open - now_ms_ + 999) / 1000 * 1000;
}

void SatCentricEnv::refill_slots() {
  slots_.assign(kSatObsSlots, -1);
  if (done_) return;
  int filled = 0;
  for (std::size_t i = 0; i < setup_->requests.size() && filled < kSatObsSlots; ++i) {
    if (completed_[i]) continue;
    if (setup_->requests[i]->dto_end_ms - setup_->tau_ms[i] < now_ms_) continue;
    slots_[static_cast<std::size_t>(filled++)] = static_cast<int>(i);
  }
}

std::vector<int> SatCentricEnv::legal_actions() const {
  std::vector<int> out;
  for (int s = 0; s < kSatObsSlots; ++s) {
    if (slots_[static_cast<std::size_t>(s)] >= 0) out.push_back(s);
  }
  return out;
}

const AcquisitionRequest* SatCentricEnv::slot_request(int slot) const {
  if (slot < 0 || slot >= kSatObsSlots) throw std::invalid_argument("slot out of range");
  const int idx = slots_[static_cast<std::size_t>(slot)];
  return idx < 0 ? nullptr : setup_->requests[static_cast<std::size_t>(idx)];
}

double SatCentricEnv::scaled_time(std::int64_t t_ms) const {
  return static_cast<double>(t_ms - setup_->horizon_start_ms) /
         static_cast<double>(setup_->horizon_end_ms - setup_->horizon_start_ms);
}

std::vector<double> SatCentricEnv::observe() const {
  std::vector<double> obs(kSatObsDim, 0.0);
  const double h = static_cast<double>(setup_->horizon_end_ms - setup_->horizon_start_ms);
  for (int s = 0; s < kSatObsSlots; ++s) {
    const int idx = slots_[static_cast<std::size_t>(s)];
    if (idx < 0) continue;
    const AcquisitionRequest* r = setup_->requests[static_cast<std::size_t>(idx)];
    double* f = obs.data() + static_cast<std::size_t>(s) * kSatSlotFeatures;
    f[0] = static_cast<double>(r->dto_start_ms - now_ms_) / h;
    f[1] = static_cast<double>(r->dto_end_ms - now_ms_) / h;
    f[2] = r->median_start.latitude_deg / 90.0;
    f[3] = r->median_start.longitude_deg / 180.0;
    f[4] = r->median_end.latitude_deg / 90.0;
    f[5] = r->median_end.longitude_deg / 180.0;
    f[6] = static_cast<double>(r->priority) / 4.0;
    f[7] = static_cast<double>(setup_->tau_ms[static_cast<std::size_t>(idx)]) / h;
    f[8] = 1.0;  // slot occupied
    f[9] = now_ms_ <= r->dto_end_ms - setup_->tau_ms[static_cast<std::size_t>(idx)] ? 1.0 : 0.0;
  }
  double* g = obs.data() + static_cast<std::size_t>(kSatObsSlots) * kSatSlotFeatures;
  g[0] = scaled_time(now_ms_);
  g[1] = last_start_.latitude_deg / 90.0;
  g[2] = last_start_.longitude_deg / 180.0;
  return obs;
}

double SatCentricEnv::step(int action) {
  if (done_) throw std::logic_error("step called on a finished episode");
  if (action < 0 || action >= kSatObsSlots) throw std::invalid_argument("action out of range");
  ++steps_;
  double reward = 0.0;
  const int idx = slots_[static_cast<std::size_t>(action)];
  if (idx < 0) {
    now_ms_ += 1000;  // failed selection costs one second
  } else {
    const AcquisitionRequest& req = *setup_->requests[static_cast<std::size_t>(idx)];
    const std::int64_t tau = setup_->tau_ms[static_cast<std::size_t>(idx)];
    const auto d = min_relay_from_attitude(now_ms_, attitude_, req.geometry(),
                                           *setup_->ephemeris, first_ ? 0 : 1);
    if (!d.has_value()) {
      now_ms_ += 1000;
    } else {
      const std::int64_t start = now_ms_ + *d * 1000;
      const std::int64_t end = start + tau;
      ChainedAcquisition acq;
      acq.request_id = req.request_id;
      acq.acquisition_start_ms = start;
      acq.acquisition_duration_ms = tau;
      acq.relay_duration_s_from_previous = *d;
      acq.start_attitude =
          attitude_pointing(interpolate_state(*setup_->ephemeris, start), req.median_start, start);
      acq.end_attitude =
          attitude_pointing(interpolate_state(*setup_->ephemeris, end), req.median_end, end);
      acquisitions_.push_back(acq);
      attitude_ = acq.end_attitude;
      now_ms_ = end;
      first_ = false;
      completed_[static_cast<std::size_t>(idx)] = 1;
      last_start_ = req.median_start;
      total_reward_ += 1.0;
      reward = 1.0;
    }
  }
  fast_forward();
  refill_slots();
  return reward;
}

SatCentricEnv make_sat_env(const ProblemInstance& instance, const std::string& satellite_id,
                           int max_steps) {
  const auto eph_it = instance.satellites.find(satellite_id);
  if (eph_it == instance.satellites.end()) {
    throw std::invalid_argument("unknown satellite " + satellite_id);
  }
  std::vector<const AcquisitionRequest*> reqs;
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (const auto& r : instance.requests) {
    lo = std::min(lo, r.dto_start_ms);
    hi = std::max(hi, r.dto_end_ms);
    if (r.satellite_id == satellite_id && !r.completed) reqs.push_back(&r);
  }
  if (lo > hi) {  // no requests at all: degenerate horizon over the ephemeris
    lo = eph_it->second.front().timestamp_ms;
    hi = eph_it->second.back().timestamp_ms;
  }
  return SatCentricEnv(satellite_id, std::move(reqs), &eph_it->second, lo, hi, max_steps);
}

// ---------------------------------------------------------------------------
// ReqCentricEnv
// ---------------------------------------------------------------------------

ReqCentricEnv::ReqCentricEnv(const ProblemInstance* instance, int max_steps) : instance_(instance) {
  (void)max_steps;
  if (instance_ == nullptr) throw std::invalid_argument("null instance");
  for (const auto& [sat, eph] : instance_->satellites) {
    if (eph.empty()) throw std::invalid_argument("satellite without ephemeris: " + sat);
    sat_ids_.push_back(sat);
  }
  if (sat_ids_.empty()) throw std::invalid_argument("instance has no satellites");
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (const auto& r : instance_->requests) {
    if (r.completed) continue;
    order_.push_back(&r);
    lo = std::min(lo, r.dto_start_ms);
    hi = std::max(hi, r.dto_end_ms);
  }
  std::sort(order_.begin(), order_.end(), [](const AcquisitionRequest* a,
                                             const AcquisitionRequest* b) {
    if (a->dto_start_ms != b->dto_start_ms) return a->dto_start_ms < b->dto_start_ms;
    return a->request_id < b->request_id;
  });
  horizon_start_ms_ = lo <= hi ? lo : 0;
  horizon_end_ms_ = lo <= hi ? std::max(hi, lo + 1) : 1;
  reset();
}

void ReqCentricEnv::reset() {
  sats_.clear();
  for (const auto& sat : sat_ids_) {
    SatState s;
    s.now_ms = instance_->satellites.at(sat).front().timestamp_ms;
    sats_.push_back(std::move(s));
  }
  cursor_ = 0;
  total_reward_ = 0.0;
}

std::optional<std::int64_t> ReqCentricEnv::min_execution_time_ms(int satellite_index) const {
  if (satellite_index < 0 || satellite_index >= action_count()) {
    throw std::invalid_argument("satellite index out of range");
  }
  if (done()) return std::nullopt;
  const AcquisitionRequest& req = *order_[cursor_];
  // A request can only be served by the satellite it is assigned to; every
  // other choice counts as "does not fit".
  if (req.satellite_id != sat_ids_[static_cast<std::size_t>(satellite_index)]) return std::nullopt;
  const SatState& s = sats_[static_cast<std::size_t>(satellite_index)];
  const auto& eph = instance_->satellites.at(sat_ids_[static_cast<std::size_t>(satellite_index)]);
  const std::int64_t t0 = std::max(s.now_ms, eph.front().timestamp_ms);
  const auto d = min_relay_from_attitude(t0, s.attitude, req.geometry(), eph, s.first ? 0 : 1);
  if (!d.has_value()) return std::nullopt;
  return t0 + *d * 1000 + req.acquisition_ms();
}

double ReqCentricEnv::step(int satellite_index) {
  if (done()) throw std::logic_error("step called on a finished episode");
  if (satellite_index < 0 || satellite_index >= action_count()) {
    throw std::invalid_argument("satellite index out of range");
  }
  const AcquisitionRequest& req = *order_[cursor_];
  SatState& s = sats_[static_cast<std::size_t>(satellite_index)];
  const auto& eph = instance_->satellites.at(sat_ids_[static_cast<std::size_t>(satellite_index)]);
  const std::int64_t t0 = std::max(s.now_ms, eph.front().timestamp_ms);
  const bool assigned = req.satellite_id == sat_ids_[static_cast<std::size_t>(satellite_index)];
  const auto d = assigned
                     ? min_relay_from_attitude(t0, s.attitude, req.geometry(), eph, s.first ? 0 : 1)
                     : std::optional<std::int64_t>{};
  double reward = 0.0;
  if (d.has_value()) {
    const std::int64_t start = t0 + *d * 1000;
    const std::int64_t end = start + req.acquisition_ms();
    ChainedAcquisition acq;
    acq.request_id = req.request_id;
    acq.acquisition_start_ms = start;
    acq.acquisition_duration_ms = req.acquisition_ms();
    acq.relay_duration_s_from_previous = *d;
    acq.start_attitude = attitude_pointing(interpolate_state(eph, start), req.median_start, start);
    acq.end_attitude = attitude_pointing(interpolate_state(eph, end), req.median_end, end);
    s.acquisitions.push_back(acq);
    s.attitude = acq.end_attitude;
    s.now_ms = end;
    s.first = false;
    total_reward_ += 1.0;
    reward = 1.0;
  }
  ++cursor_;
  return reward;
}

int ReqCentricEnv::obs_dim() const { return 10 + 6 * action_count(); }

std::vector<double> ReqCentricEnv::observe() const {
  std::vector<double> obs(static_cast<std::size_t>(obs_dim()), 0.0);
  if (done()) return obs;
  const double h = static_cast<double>(horizon_end_ms_ - horizon_start_ms_);
  std::int64_t now_ref = std::numeric_limits<std::int64_t>::max();
  for (const auto& s : sats_) now_ref = std::min(now_ref, s.now_ms);
  const AcquisitionRequest& r = *order_[cursor_];
  obs[0] = static_cast<double>(r.dto_start_ms - now_ref) / h;
  obs[1] = static_cast<double>(r.dto_end_ms - now_ref) / h;
  obs[2] = r.median_start.latitude_deg / 90.0;
  obs[3] = r.median_start.longitude_deg / 180.0;
  obs[4] = r.median_end.latitude_deg / 90.0;
  obs[5] = r.median_end.longitude_deg / 180.0;
  obs[6] = static_cast<double>(r.priority) / 4.0;
  obs[7] = static_cast<double>(r.acquisition_ms()) / h;
  obs[8] = 1.0;
  obs[9] = 1.0;
  for (int k = 0; k < action_count(); ++k) {
    double* f = obs.data() + 10 + static_cast<std::size_t>(k) * 6;
    const auto met = min_execution_time_ms(k);
    f[0] = met.has_value() ? static_cast<double>(*met - horizon_start_ms_) / h : -1.0;
    // The satellite's five nearest upcoming options by DTO open time.
    for (int j = 0; j < 5; ++j) {
      const std::size_t pos = cursor_ + 1 + static_cast<std::size_t>(j);
      if (pos >= order_.size()) break;
      f[1 + j] = static_cast<double>(order_[pos]->dto_start_ms -
                                     sats_[static_cast<std::size_t>(k)].now_ms) /
                 h;
    }
  }
  return obs;
}

const std::vector<ChainedAcquisition>& ReqCentricEnv::acquisitions(int satellite_index) const {
  if (satellite_index < 0 || satellite_index >= action_count()) {
    throw std::invalid_argument("satellite index out of range");
  }
  return sats_[static_cast<std::size_t>(satellite_index)].acquisitions;
}

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

namespace {

Policy make_policy_shape(PolicyKind kind, int obs_dim, int n_actions) {
  Policy p;
  p.kind = kind;
  p.obs_dim = obs_dim;
  p.n_actions = n_actions;
  p.encoder = Mlp::zeros({obs_dim, 256, 32});
  p.value_head = Mlp::zeros({32, 1});
  if (kind == PolicyKind::kClassical) {
    p.policy_head = Mlp::zeros({32, n_actions});
  } else {
    p.pqc_params.assign(PqcSpec::n_params, 0.0);
    p.head_w.assign(static_cast<std::size_t>(n_actions) * 2, 0.0);
    p.head_b.assign(static_cast<std::size_t>(n_actions), 0.0);
  }
  return p;
}

}  // namespace

Policy Policy::make(PolicyKind kind, int obs_dim, int n_actions, Rng& rng) {
  if (kind == PolicyKind::kHybrid && static_cast<int>(PqcSpec::n_features) != 32) {
    throw std::logic_error("encoder width must match the circuit feature count");
  }
  Policy p = make_policy_shape(kind, obs_dim, n_actions);
  p.encoder = Mlp::make({obs_dim, 256, 32}, rng);
  p.value_head = Mlp::make({32, 1}, rng);
  if (kind == PolicyKind::kClassical) {
    p.policy_head = Mlp::make({32, n_actions}, rng);
  } else {
    for (double& x : p.pqc_params) x = rng.uniform(-constants::kPi, constants::kPi);
    const double bound = std::sqrt(6.0 / (2.0 + n_actions));
    for (double& x : p.head_w) x = rng.uniform(-bound, bound);
  }
  return p;
}

Policy Policy::zeros_like(const Policy& p) {
  return make_policy_shape(p.kind, p.obs_dim, p.n_actions);
}

std::size_t Policy::param_count() const {
  std::size_t n = encoder.param_count() + value_head.param_count();
  if (kind == PolicyKind::kClassical) {
    n += policy_head.param_count();
  } else {
    n += pqc_params.size() + head_w.size() + head_b.size();
  }
  return n;
}

std::vector<double> Policy::get_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  encoder.append_params(flat);
  value_head.append_params(flat);
  if (kind == PolicyKind::kClassical) {
    policy_head.append_params(flat);
  } else {
    flat.insert(flat.end(), pqc_params.begin(), pqc_params.end());
    flat.insert(flat.end(), head_w.begin(), head_w.end());
    flat.insert(flat.end(), head_b.begin(), head_b.end());
  }
  return flat;
}

void Policy::set_params(std::span<const double> flat) {
  if (flat.size() != param_count()) throw std::invalid_argument("parameter vector size mismatch");
  const double* it = flat.data();
  it = encoder.read_params(it);
  it = value_head.read_params(it);
  if (kind == PolicyKind::kClassical) {
    it = policy_head.read_params(it);
  } else {
    for (double& x : pqc_params) x = *it++;
    for (double& x : head_w) x = *it++;
    for (double& x : head_b) x = *it++;
  }
}

void policy_eval(const Policy& p, std::span<const double> obs, std::vector<double>& logits,
                 double& value, PolicyEvalCache* cache) {
  PolicyEvalCache local;
  PolicyEvalCache& c = cache != nullptr ? *cache : local;
  const std::vector<double> raw = mlp_forward(p.encoder, obs, &c.encoder);
  c.code.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) c.code[i] = std::tanh(raw[i]);
  value = mlp_forward(p.value_head, c.code, &c.value)[0];
  if (p.kind == PolicyKind::kClassical) {
    logits = mlp_forward(p.policy_head, c.code, &c.policy);
  } else {
    std::vector<double> features(c.code.size());
    for (std::size_t i = 0; i < c.code.size(); ++i) features[i] = constants::kPi * c.code[i];
    c.pqc = simulate(p.pqc_params, features);
    logits.assign(static_cast<std::size_t>(p.n_actions), 0.0);
    for (int j = 0; j < p.n_actions; ++j) {
      logits[static_cast<std::size_t>(j)] = p.head_w[static_cast<std::size_t>(j) * 2] * c.pqc.exp_z0 +
                                            p.head_w[static_cast<std::size_t>(j) * 2 + 1] * c.pqc.exp_z1 +
                                            p.head_b[static_cast<std::size_t>(j)];
    }
  }
}

void policy_backward(const Policy& p, const PolicyEvalCache& cache,
                     std::span<const double> dlogits, double dvalue, Policy& grads) {
  std::vector<double> dcode(cache.code.size(), 0.0);
  {
    const std::vector<double> dv{dvalue};
    const std::vector<double> dx = mlp_backward(p.value_head, cache.value, dv, grads.value_head);
    for (std::size_t i = 0; i < dcode.size(); ++i) dcode[i] += dx[i];
  }
  if (p.kind == PolicyKind::kClassical) {
    const std::vector<double> dx = mlp_backward(p.policy_head, cache.policy, dlogits,
                                                grads.policy_head);
    for (std::size_t i = 0; i < dcode.size(); ++i) dcode[i] += dx[i];
  } else {
    double dz0 = 0.0;
    double dz1 = 0.0;
    for (int j = 0; j < p.n_actions; ++j) {
      const double dl = dlogits[static_cast<std::size_t>(j)];
      if (dl == 0.0) continue;
      dz0 += dl * p.head_w[static_cast<std::size_t>(j) * 2];
      dz1 += dl * p.head_w[static_cast<std::size_t>(j) * 2 + 1];
      grads.head_w[static_cast<std::size_t>(j) * 2] += dl * cache.pqc.exp_z0;
      grads.head_w[static_cast<std::size_t>(j) * 2 + 1] += dl * cache.pqc.exp_z1;
      grads.head_b[static_cast<std::size_t>(j)] += dl;
    }
    if (dz0 != 0.0 || dz1 != 0.0) {
      std::vector<double> features(cache.code.size());
      for (std::size_t i = 0; i < cache.code.size(); ++i) {
        features[i] = constants::kPi * cache.code[i];
      }
      const auto pg = param_shift_grad(p.pqc_params, features);
      for (int k = 0; k < PqcSpec::n_params; ++k) {
        grads.pqc_params[static_cast<std::size_t>(k)] +=
            pg[static_cast<std::size_t>(k)][0] * dz0 + pg[static_cast<std::size_t>(k)][1] * dz1;
      }
      const auto fg = feature_shift_grad(p.pqc_params, features);
      for (int i = 0; i < PqcSpec::n_features; ++i) {
        dcode[static_cast<std::size_t>(i)] +=
            constants::kPi * (fg[static_cast<std::size_t>(i)][0] * dz0 +
                              fg[static_cast<std::size_t>(i)][1] * dz1);
      }
    }
  }
  // Undo the tanh squash on the encoder output.
  for (std::size_t i = 0; i < dcode.size(); ++i) {
    dcode[i] *= 1.0 - cache.code[i] * cache.code[i];
  }
  mlp_backward(p.encoder, cache.encoder, dcode, grads.encoder);
}

// ---------------------------------------------------------------------------
// PPO
// ---------------------------------------------------------------------------

double ppo_clip_loss(std::span<const double> ratios, std::span<const double> advantages,
                     double epsilon) {
  if (ratios.size() != advantages.size()) throw std::invalid_argument("batch length mismatch");
  if (ratios.empty()) throw std::invalid_argument("empty batch");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double r = ratios[i];
    const double a = advantages[i];
    total += std::min(r * a, std::clamp(r, 1.0 - epsilon, 1.0 + epsilon) * a);
  }
  return total / static_cast<double>(ratios.size());
}

double ppo_batch_loss(const Policy& p, const std::vector<PpoSample>& batch,
                      const PpoConfig& config, Policy* grads) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> logits;
  std::vector<double> probs;
  std::vector<double> dlogits;
  for (const PpoSample& s : batch) {
    PolicyEvalCache cache;
    double value = 0.0;
    policy_eval(p, s.obs, logits, value, &cache);
    masked_softmax(logits, s.legal, probs);
    const double pa = std::max(probs[static_cast<std::size_t>(s.action)], 1e-12);
    const double logp = std::log(pa);
    const double ratio = std::exp(logp - s.logp_old);
    const double unclipped = ratio * s.advantage;
    const double clipped =
        std::clamp(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps) * s.advantage;
    const double surrogate = std::min(unclipped, clipped);
    double entropy = 0.0;
    for (int a : s.legal) {
      const double q = probs[static_cast<std::size_t>(a)];
      if (q > 0.0) entropy -= q * std::log(q);
    }
    const double verr = value - s.value_target;
    loss += inv_n * (-surrogate + config.value_coef * 0.5 * verr * verr -
                     config.entropy_coef * entropy);
    if (grads == nullptr) continue;

    const double dsurr_dlogp = unclipped <= clipped ? unclipped : 0.0;
    const double dloss_dlogp = -inv_n * dsurr_dlogp;
    dlogits.assign(logits.size(), 0.0);
    for (int a : s.legal) {
      const double q = probs[static_cast<std::size_t>(a)];
      const double indicator = a == s.action ? 1.0 : 0.0;
      double d = dloss_dlogp * (indicator - q);
      if (q > 0.0) d += inv_n * config.entropy_coef * q * (std::log(q) + entropy);
      dlogits[static_cast<std::size_t>(a)] = d;
    }
    const double dvalue = inv_n * config.value_coef * verr;
    policy_backward(p, cache, dlogits, dvalue, *grads);
  }
  return loss;
}

PpoResult train_ppo(const SatCentricEnv& env_template, PolicyKind kind, const PpoConfig& config,
                    std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  SatCentricEnv env = env_template;
  env.reset();
  Policy policy = Policy::make(kind, kSatObsDim, env.action_count(), rng);
  std::vector<double> flat = policy.get_params();
  Adam adam;

  PpoResult result;
  int steps_done = 0;
  double last_mean_reward = 0.0;

  struct StepRecord {
    std::vector<double> obs;
    std::vector<int> legal;
    int action;
    double logp;
    double value;
    double reward;
    bool terminal;
  };

  while (steps_done < config.total_steps && elapsed_s(t0) < config.time_limit_s) {
    std::vector<StepRecord> rollout;
    rollout.reserve(static_cast<std::size_t>(config.rollout_steps));
    std::vector<double> episode_rewards;
    double episode_reward = 0.0;
    std::vector<double> logits;
    std::vector<double> probs;
    for (int t = 0; t < config.rollout_steps; ++t) {
      if (env.done()) {
        episode_rewards.push_back(episode_reward);
        episode_reward = 0.0;
        env.reset();
      }
      StepRecord rec;
      rec.obs = env.observe();
      rec.legal = env.legal_actions();
      double value = 0.0;
      policy_eval(policy, rec.obs, logits, value, nullptr);
      masked_softmax(logits, rec.legal, probs);
      rec.action = sample_from(probs, rec.legal, rng);
      rec.logp = std::log(std::max(probs[static_cast<std::size_t>(rec.action)], 1e-12));
      rec.value = value;
      rec.reward = env.step(rec.action);
      rec.terminal = env.done();
      episode_reward += rec.reward;
      rollout.push_back(std::move(rec));
    }
    steps_done += config.rollout_steps;

    // Bootstrap value for a truncated final episode.
    double bootstrap = 0.0;
    if (!env.done()) {
      std::vector<double> tail_logits;
      policy_eval(policy, env.observe(), tail_logits, bootstrap, nullptr);
    }

    // GAE advantages.
    std::vector<double> advantages(rollout.size(), 0.0);
    double gae = 0.0;
    double next_value = bootstrap;
    for (std::size_t i = rollout.size(); i-- > 0;) {
      const StepRecord& rec = rollout[i];
      const double mask = rec.terminal ? 0.0 : 1.0;
      const double delta = rec.reward + config.gamma * next_value * mask - rec.value;
      gae = delta + config.gamma * config.gae_lambda * mask * gae;
      advantages[i] = gae;
      next_value = rec.value;
    }
    double mean_a = 0.0;
    for (double a : advantages) mean_a += a;
    mean_a /= static_cast<double>(advantages.size());
    double var_a = 0.0;
    for (double a : advantages) var_a += (a - mean_a) * (a - mean_a);
    const double std_a = std::sqrt(var_a / static_cast<double>(advantages.size()));

    std::vector<PpoSample> samples(rollout.size());
    for (std::size_t i = 0; i < rollout.size(); ++i) {
      samples[i].obs = std::move(rollout[i].obs);
      samples[i].legal = std::move(rollout[i].legal);
      samples[i].action = rollout[i].action;
      samples[i].logp_old = rollout[i].logp;
      samples[i].advantage = (advantages[i] - mean_a) / (std_a + 1e-8);
      samples[i].value_target = advantages[i] + rollout[i].value;
    }

    std::vector<std::size_t> index(samples.size());
    std::iota(index.begin(), index.end(), 0);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t i = index.size(); i > 1; --i) {  // Fisher-Yates
        std::swap(index[i - 1], index[static_cast<std::size_t>(rng.uniform_int(i))]);
      }
      for (std::size_t start = 0; start < index.size();
           start += static_cast<std::size_t>(config.minibatch)) {
        const std::size_t stop =
            std::min(index.size(), start + static_cast<std::size_t>(config.minibatch));
        std::vector<PpoSample> batch;
        batch.reserve(stop - start);
        for (std::size_t i = start; i < stop; ++i) batch.push_back(samples[index[i]]);
        Policy grads = Policy::zeros_like(policy);
        const double loss = ppo_batch_loss(policy, batch, config, &grads);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << "ppo diverged: non-finite loss at step " << steps_done;
          throw std::runtime_error(msg.str());
        }
        adam.step(flat, grads.get_params(), config.lr);
        policy.set_params(flat);
      }
    }

    if (!episode_rewards.empty()) {
      double m = 0.0;
      for (double r : episode_rewards) m += r;
      last_mean_reward = m / static_cast<double>(episode_rewards.size());
    }
    result.curve.push_back({steps_done, last_mean_reward});
  }
  result.policy = std::move(policy);
  return result;
}

// ---------------------------------------------------------------------------
// MCTS
// ---------------------------------------------------------------------------

double UniformEvaluator::evaluate(const RolloutEnv& env, std::vector<double>& priors) {
  priors.assign(static_cast<std::size_t>(env.action_count()), 0.0);
  const std::vector<int> legal = env.legal_actions();
  if (legal.empty()) return 0.0;
  const double p = 1.0 / static_cast<double>(legal.size());
  for (int a : legal) priors[static_cast<std::size_t>(a)] = p;
  return 0.0;
}

double PolicyEvaluator::evaluate(const RolloutEnv& env, std::vector<double>& priors) {
  std::vector<double> logits;
  double value = 0.0;
  policy_eval(*policy_, env.observe(), logits, value, nullptr);
  masked_softmax(logits, env.legal_actions(), priors);
  return value;
}

namespace {

struct MctsNode {
  std::unique_ptr<RolloutEnv> env;
  bool terminal{false};
  double reward_in{0.0};  // reward collected on the edge into this node
  int n{0};
  double w{0.0};
  std::vector<int> actions;
  std::vector<double> priors;
  std::vector<int> child;  // node index per action slot, -1 until created
};

}  // namespace

MctsResult mcts_search(const RolloutEnv& root_env, Evaluator& evaluator, const MctsConfig& config,
                       std::uint64_t seed) {
  if (config.n_simulations < 1) throw std::invalid_argument("n_simulations must be >= 1");
  Rng rng(seed);
  MctsResult result;
  if (root_env.done()) {
    result.root_value = 0.0;
    return result;
  }

  std::vector<MctsNode> nodes;
  nodes.emplace_back();
  nodes[0].env = root_env.clone();
  {
    std::vector<double> priors;
    evaluator.evaluate(*nodes[0].env, priors);
    nodes[0].actions = nodes[0].env->legal_actions();
    for (int a : nodes[0].actions) nodes[0].priors.push_back(priors[static_cast<std::size_t>(a)]);
    nodes[0].child.assign(nodes[0].actions.size(), -1);
  }

  // Returns in this problem can span a wide range (an episode may collect one
  // reward per remaining request), so raw action values would drown the
  // exploration term. Q values are min-max normalized over everything seen in
  // this search; unvisited children sit at the midpoint so the prior term
  // decides between them without drowning out a child that proved better.
  double q_min = std::numeric_limits<double>::infinity();
  double q_max = -std::numeric_limits<double>::infinity();
  const auto normalized = [&](double q) {
    return q_max > q_min + 1e-12 ? (q - q_min) / (q_max - q_min) : 0.5;
  };

  std::vector<int> path;
  for (int sim = 0; sim < config.n_simulations; ++sim) {
    path.clear();
    int cur = 0;
    double leaf_value = 0.0;
    for (;;) {
      path.push_back(cur);
      MctsNode& node = nodes[static_cast<std::size_t>(cur)];
      if (node.terminal) {
        leaf_value = 0.0;
        break;
      }
      // PUCT over this node's actions. The +1 keeps the prior term alive on
      // the very first selection, when the visit count is still zero.
      const double sqrt_n = std::sqrt(static_cast<double>(node.n) + 1.0);
      double best = -std::numeric_limits<double>::infinity();
      std::vector<std::size_t> ties;
      for (std::size_t i = 0; i < node.actions.size(); ++i) {
        const int ci = node.child[i];
        const int n_i = ci >= 0 ? nodes[static_cast<std::size_t>(ci)].n : 0;
        const double q =
            n_i > 0 ? normalized(nodes[static_cast<std::size_t>(ci)].w / static_cast<double>(n_i))
                    : 0.5;
        const double score = q + config.c_puct * node.priors[i] * sqrt_n / (1.0 + n_i);
        if (score > best + 1e-12) {
          best = score;
          ties.assign(1, i);
        } else if (score > best - 1e-12) {
          ties.push_back(i);
        }
      }
      const std::size_t pick =
          ties[ties.size() == 1 ? 0 : static_cast<std::size_t>(rng.uniform_int(ties.size()))];
      if (node.child[pick] >= 0) {
        cur = node.child[pick];
        continue;
      }
      // Expand: materialize the chosen child and evaluate it.
      MctsNode leaf;
      leaf.env = node.env->clone();
      leaf.reward_in = leaf.env->step(node.actions[pick]);
      leaf.terminal = leaf.env->done();
      if (!leaf.terminal) {
        std::vector<double> priors;
        leaf_value = evaluator.evaluate(*leaf.env, priors);
        leaf.actions = leaf.env->legal_actions();
        for (int a : leaf.actions) leaf.priors.push_back(priors[static_cast<std::size_t>(a)]);
        leaf.child.assign(leaf.actions.size(), -1);
      } else {
        leaf_value = 0.0;
      }
      const int leaf_index = static_cast<int>(nodes.size());
      nodes.push_back(std::move(leaf));
      nodes[static_cast<std::size_t>(cur)].child[pick] = leaf_index;
      path.push_back(leaf_index);
      break;
    }
    // Backpropagation: each node accumulates the return of the edge leading
    // into it — its entry reward plus everything collected below it — so that
    // w/n is the action value its parent selects on.
    double g = leaf_value;
    for (std::size_t i = path.size(); i-- > 0;) {
      MctsNode& node = nodes[static_cast<std::size_t>(path[i])];
      g += node.reward_in;
      node.n += 1;
      node.w += g;
      const double q = node.w / static_cast<double>(node.n);
      q_min = std::min(q_min, q);
      q_max = std::max(q_max, q);
    }
  }

  const MctsNode& root = nodes[0];
  result.visits.assign(static_cast<std::size_t>(root_env.action_count()), 0);
  result.pi.assign(static_cast<std::size_t>(root_env.action_count()), 0.0);
  for (std::size_t i = 0; i < root.actions.size(); ++i) {
    const int ci = root.child[i];
    if (ci < 0) continue;
    result.visits[static_cast<std::size_t>(root.actions[i])] = nodes[static_cast<std::size_t>(ci)].n;
  }
  for (std::size_t i = 0; i < result.pi.size(); ++i) {
    result.pi[i] = static_cast<double>(result.visits[i]) / config.n_simulations;
  }
  result.root_value = root.n > 0 ? root.w / root.n : 0.0;
  return result;
}

// ---------------------------------------------------------------------------
// AlphaZero
// ---------------------------------------------------------------------------

namespace {

struct ReplaySample {
  std::vector<double> obs;
  std::vector<int> legal;
  std::vector<double> pi;  // over all actions, mass only on legal
  double value_target{0.0};
};

int argmax_visits(const MctsResult& res) {
  int best = -1;
  int best_n = -1;
  for (std::size_t a = 0; a < res.visits.size(); ++a) {
    if (res.visits[a] > best_n) {
      best_n = res.visits[a];
      best = static_cast<int>(a);
    }
  }
  return best;
}

}  // namespace

AlphaZeroResult train_alphazero(const SatCentricEnv& env_template, const AlphaZeroConfig& config,
                                std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  SatCentricEnv env = env_template;
  Policy policy = Policy::make(PolicyKind::kHybrid, kSatObsDim, env.action_count(), rng);
  std::vector<double> flat = policy.get_params();
  Adam adam;
  std::vector<ReplaySample> buffer;
  AlphaZeroResult result;

  const MctsConfig mcts_cfg{config.n_simulations, config.c_puct};
  for (int ep = 0; ep < config.episodes && elapsed_s(t0) < config.time_limit_s; ++ep) {
    env.reset();
    PolicyEvaluator evaluator(&policy);
    std::vector<ReplaySample> episode_samples;
    std::vector<double> rewards;
    while (!env.done()) {
      const MctsResult res = mcts_search(env, evaluator, mcts_cfg, rng.next_u64());
      if (res.visits.empty()) break;
      ReplaySample sample;
      sample.obs = env.observe();
      sample.legal = env.legal_actions();
      sample.pi = res.pi;
      episode_samples.push_back(std::move(sample));
      int action;
      if (config.temperature > 0.0) {
        action = sample_from(res.pi, env.legal_actions(), rng);
      } else {
        action = argmax_visits(res);
      }
      rewards.push_back(env.step(action));
    }
    // Return-to-go value targets.
    double g = 0.0;
    for (std::size_t i = episode_samples.size(); i-- > 0;) {
      g += rewards[i];
      episode_samples[i].value_target = g;
    }
    for (auto& s : episode_samples) {
      if (buffer.size() >= config.buffer_capacity) {
        buffer[static_cast<std::size_t>(rng.uniform_int(buffer.size()))] = std::move(s);
      } else {
        buffer.push_back(std::move(s));
      }
    }
    const double norm = env.request_count() == 0
                            ? 0.0
                            : env.total_reward() / static_cast<double>(env.request_count());
    result.curve.push_back({ep, norm});

    for (int it = 0; it < config.train_steps_per_episode && !buffer.empty(); ++it) {
      const std::size_t bsz = std::min<std::size_t>(static_cast<std::size_t>(config.batch),
                                                    buffer.size());
      Policy grads = Policy::zeros_like(policy);
      double policy_loss = 0.0;
      double total_loss = 0.0;
      const double inv_n = 1.0 / static_cast<double>(bsz);
      std::vector<double> logits;
      std::vector<double> probs;
      std::vector<double> dlogits;
      for (std::size_t bi = 0; bi < bsz; ++bi) {
        const ReplaySample& s = buffer[static_cast<std::size_t>(rng.uniform_int(buffer.size()))];
        PolicyEvalCache cache;
        double value = 0.0;
        policy_eval(policy, s.obs, logits, value, &cache);
        masked_softmax(logits, s.legal, probs);
        double ce = 0.0;
        for (int a : s.legal) {
          const double target = s.pi[static_cast<std::size_t>(a)];
          if (target > 0.0) {
            ce -= target * std::log(std::max(probs[static_cast<std::size_t>(a)], 1e-12));
          }
        }
        const double verr = value - s.value_target;
        policy_loss += inv_n * ce;
        total_loss += inv_n * (ce + 0.5 * verr * verr);
        dlogits.assign(logits.size(), 0.0);
        for (int a : s.legal) {
          dlogits[static_cast<std::size_t>(a)] =
              inv_n * (probs[static_cast<std::size_t>(a)] - s.pi[static_cast<std::size_t>(a)]);
        }
        policy_backward(policy, cache, dlogits, inv_n * verr, grads);
      }
      if (!std::isfinite(total_loss)) {
        std::ostringstream msg;
        msg << "alphazero diverged: non-finite loss at episode " << ep;
        throw std::runtime_error(msg.str());
      }
      adam.step(flat, grads.get_params(), config.lr);
      policy.set_params(flat);
      result.policy_loss_history.push_back(policy_loss);
    }
  }
  result.policy = std::move(policy);
  return result;
}

// ---------------------------------------------------------------------------
// Deployment
// ---------------------------------------------------------------------------

namespace {

void collect_env_plan(SatCentricEnv& env, Plan& plan) {
  plan.satellites[env.satellite_id()] = env.acquisitions();
}

}  // namespace

Plan plan_with_policy(const ProblemInstance& instance, const Policy& policy) {
  Plan plan;
  std::vector<double> logits;
  for (const auto& [sat, eph] : instance.satellites) {
    (void)eph;
    SatCentricEnv env = make_sat_env(instance, sat);
    while (!env.done()) {
      const std::vector<int> legal = env.legal_actions();
      if (legal.empty()) break;
      double value = 0.0;
      policy_eval(policy, env.observe(), logits, value, nullptr);
      int best = legal.front();
      for (int a : legal) {
        if (logits[static_cast<std::size_t>(a)] > logits[static_cast<std::size_t>(best)]) best = a;
      }
      env.step(best);
    }
    collect_env_plan(env, plan);
  }
  compute_stats(plan, instance);
  return plan;
}

Plan plan_with_mcts(const ProblemInstance& instance, const Policy& policy,
                    const MctsConfig& config, std::uint64_t seed) {
  Plan plan;
  Rng rng(seed);
  PolicyEvaluator evaluator(&policy);
  for (const auto& [sat, eph] : instance.satellites) {
    (void)eph;
    SatCentricEnv env = make_sat_env(instance, sat);
    while (!env.done()) {
      const MctsResult res = mcts_search(env, evaluator, config, rng.next_u64());
      if (res.visits.empty()) break;
      env.step(argmax_visits(res));
    }
    collect_env_plan(env, plan);
  }
  compute_stats(plan, instance);
  return plan;
}

// ---------------------------------------------------------------------------
// Checkpoints and curves
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x4F53504Cu;  // "OSPL"
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T take(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::invalid_argument("truncated checkpoint");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

std::uint64_t shape_hash(const Policy& p) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the shape descriptor
  const auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(p.kind));
  mix(static_cast<std::uint64_t>(p.obs_dim));
  mix(static_cast<std::uint64_t>(p.n_actions));
  mix(p.param_count());
  return h;
}

}  // namespace

std::vector<std::uint8_t> serialize_policy(const Policy& p) {
  std::vector<std::uint8_t> out;
  put(out, kCheckpointMagic);
  put(out, kCheckpointVersion);
  put(out, static_cast<std::uint32_t>(p.kind));
  put(out, static_cast<std::int32_t>(p.obs_dim));
  put(out, static_cast<std::int32_t>(p.n_actions));
  put(out, shape_hash(p));
  const std::vector<double> flat = p.get_params();
  put(out, static_cast<std::uint64_t>(flat.size()));
  for (double x : flat) put(out, x);
  return out;
}

Policy deserialize_policy(const std::vector<std::uint8_t>& blob) {
  std::size_t pos = 0;
  if (take<std::uint32_t>(blob, pos) != kCheckpointMagic) {
    throw std::runtime_error("not a policy checkpoint");
  }
  if (take<std::uint32_t>(blob, pos) != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  const auto kind = static_cast<PolicyKind>(take<std::uint32_t>(blob, pos));
  const int obs_dim = take<std::int32_t>(blob, pos);
  const int n_actions = take<std::int32_t>(blob, pos);
  const std::uint64_t hash = take<std::uint64_t>(blob, pos);
  Policy p = make_policy_shape(kind, obs_dim, n_actions);
  if (hash != shape_hash(p)) throw std::runtime_error("checkpoint shape hash mismatch");
  const std::uint64_t count = take<std::uint64_t>(blob, pos);
  if (count != p.param_count()) throw std::runtime_error("checkpoint parameter count mismatch");
  std::vector<double> flat(count);
  for (double& x : flat) x = take<double>(blob, pos);
  p.set_params(flat);
  return p;
}

std::string curve_csv(const std::vector<TrainCurvePoint>& curve) {
  std::ostringstream out;
  out << "step,mean_reward\n";
  out << std::setprecision(12);
  for (const auto& point : curve) out << point.step << "," << point.mean_reward << "\n";
  return out.str();
}

}  // namespace orbitsched
