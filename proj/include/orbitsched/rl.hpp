#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orbitsched/core_model.hpp"
#include "orbitsched/mlp.hpp"
#include "orbitsched/pqc.hpp"

namespace orbitsched {

class Rng;

// ---------------------------------------------------------------------------
// Abstract episodic environment used by the tree search (and implemented by
// the satellite-centred scheduling environment below).
// ---------------------------------------------------------------------------

class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;
  virtual int action_count() const = 0;
  virtual std::vector<int> legal_actions() const = 0;
  virtual double step(int action) = 0;  // returns the reward; mutates state
  virtual bool done() const = 0;
  virtual std::vector<double> observe() const = 0;
  virtual std::unique_ptr<RolloutEnv> clone() const = 0;
};

// ---------------------------------------------------------------------------
// Satellite-centred environment: one agent per satellite picks, each step,
// one of the 100 nearest (by DTO open time) incomplete requests. Reward is 1
// on a committed acquisition and 0 otherwise; a failed selection costs 1 s.
// ---------------------------------------------------------------------------

inline constexpr int kSatObsSlots = 100;
inline constexpr int kSatSlotFeatures = 10;
inline constexpr int kSatObsDim = kSatObsSlots * kSatSlotFeatures + 3;  // 1003

class SatCentricEnv final : public RolloutEnv {
 public:
  // `requests` must outlive the environment (pointers into a ProblemInstance).
  SatCentricEnv(std::string satellite_id, std::vector<const AcquisitionRequest*> requests,
                const std::vector<EphemerisRecord>* ephemeris, std::int64_t horizon_start_ms,
                std::int64_t horizon_end_ms, int max_steps = 20000);

  void reset();

  int action_count() const override { return kSatObsSlots; }
  std::vector<int> legal_actions() const override;
  double step(int action) override;
  bool done() const override { return done_; }
  std::vector<double> observe() const override;
  std::unique_ptr<RolloutEnv> clone() const override {
    return std::make_unique<SatCentricEnv>(*this);
  }

  std::int64_t now_ms() const { return now_ms_; }
  double total_reward() const { return total_reward_; }
  int steps() const { return steps_; }
  const std::string& satellite_id() const { return setup_->satellite_id; }
  const std::vector<ChainedAcquisition>& acquisitions() const { return acquisitions_; }
  std::size_t request_count() const { return setup_->requests.size(); }
  // Request shown in a slot, or nullptr for an empty slot.
  const AcquisitionRequest* slot_request(int slot) const;

 private:
  struct Setup {
    std::string satellite_id;
    std::vector<const AcquisitionRequest*> requests;  // sorted by DTO start
    std::vector<std::int64_t> tau_ms;
    const std::vector<EphemerisRecord>* ephemeris;
    std::int64_t horizon_start_ms;
    std::int64_t horizon_end_ms;
    int max_steps;
  };

  void refill_slots();
  void fast_forward();
  double scaled_time(std::int64_t t_ms) const;

  std::shared_ptr<const Setup> setup_;
  std::int64_t now_ms_{0};
  Attitude attitude_{};
  bool first_{true};
  std::vector<std::uint8_t> completed_;
  std::vector<int> slots_;  // request index per slot, -1 when empty
  std::vector<ChainedAcquisition> acquisitions_;
  GeoPoint last_start_{0.0, 0.0};
  double total_reward_{0.0};
  int steps_{0};
  bool done_{false};
};

// Environment over one satellite's pre-assigned incomplete requests.
SatCentricEnv make_sat_env(const ProblemInstance& instance, const std::string& satellite_id,
                           int max_steps = 20000);

// ---------------------------------------------------------------------------
// Request-centred environment: requests are visited in DTO-start order and
// each step picks the satellite that should serve the current request.
// ---------------------------------------------------------------------------

class ReqCentricEnv {
 public:
  explicit ReqCentricEnv(const ProblemInstance* instance, int max_steps = 100000);

  void reset();
  int action_count() const { return static_cast<int>(sat_ids_.size()); }
  double step(int satellite_index);  // reward 1 if the request fits, else 0
  bool done() const { return cursor_ >= order_.size(); }
  std::vector<double> observe() const;
  int obs_dim() const;
  double total_reward() const { return total_reward_; }
  // Timestamp + maneuver + acquisition if the satellite took the current
  // request; nullopt when the chaining search finds no fit.
  std::optional<std::int64_t> min_execution_time_ms(int satellite_index) const;
  const std::vector<ChainedAcquisition>& acquisitions(int satellite_index) const;
  const std::vector<std::string>& satellite_ids() const { return sat_ids_; }

 private:
  struct SatState {
    std::int64_t now_ms{0};
    Attitude attitude{};
    bool first{true};
    std::vector<ChainedAcquisition> acquisitions;
  };

  const ProblemInstance* instance_;
  std::vector<std::string> sat_ids_;
  std::vector<const AcquisitionRequest*> order_;  // DTO-start order
  std::vector<SatState> sats_;
  std::size_t cursor_{0};
  double total_reward_{0.0};
  std::int64_t horizon_start_ms_{0};
  std::int64_t horizon_end_ms_{1};
};

// ---------------------------------------------------------------------------
// Policies: shared encoder (256/32) with a value neuron, and either a
// classical linear policy head or the 4-qubit circuit followed by an affine
// 2 -> n_actions map.
// ---------------------------------------------------------------------------

enum class PolicyKind { kClassical, kHybrid };

struct Policy {
  PolicyKind kind{PolicyKind::kClassical};
  int obs_dim{0};
  int n_actions{0};
  Mlp encoder;                      // obs -> 256 -> 32 (tanh output, see eval)
  Mlp value_head;                   // 32 -> 1
  Mlp policy_head;                  // classical only: 32 -> n_actions
  std::vector<double> pqc_params;   // hybrid only: 36 angles
  std::vector<double> head_w;       // hybrid only: n_actions x 2, row-major
  std::vector<double> head_b;       // hybrid only: n_actions

  static Policy make(PolicyKind kind, int obs_dim, int n_actions, Rng& rng);
  static Policy zeros_like(const Policy& p);

  std::size_t param_count() const;
  std::vector<double> get_params() const;
  void set_params(std::span<const double> flat);
};

struct PolicyEvalCache {
  MlpCache encoder;
  MlpCache value;
  MlpCache policy;
  std::vector<double> code;  // 32-dim encoder output (tanh-squashed)
  PqcOutput pqc{};
};

void policy_eval(const Policy& p, std::span<const double> obs, std::vector<double>& logits,
                 double& value, PolicyEvalCache* cache = nullptr);

// Accumulates parameter gradients for dL/dlogits and dL/dvalue of one sample.
// Hybrid policy-head gradients flow through the circuit via the shift rule.
void policy_backward(const Policy& p, const PolicyEvalCache& cache,
                     std::span<const double> dlogits, double dvalue, Policy& grads);

// ---------------------------------------------------------------------------
// PPO
// ---------------------------------------------------------------------------

// Clip surrogate of the ratio/advantage batch (to be maximized).
double ppo_clip_loss(std::span<const double> ratios, std::span<const double> advantages,
                     double epsilon);

struct PpoConfig {
  int total_steps{20000};
  int rollout_steps{1024};
  int epochs{4};
  int minibatch{64};
  double lr{3e-4};
  double clip_eps{0.2};
  double gamma{0.99};
  double gae_lambda{0.95};
  double value_coef{0.5};
  double entropy_coef{0.01};
  double time_limit_s{1e18};
};

struct PpoSample {
  std::vector<double> obs;
  std::vector<int> legal;
  int action{0};
  double logp_old{0.0};
  double advantage{0.0};
  double value_target{0.0};
};

// Minimized total loss: -clip surrogate + value_coef * 0.5 * value MSE
// - entropy_coef * entropy. When `grads` is non-null, mean parameter
// gradients over the batch are accumulated into it.
double ppo_batch_loss(const Policy& p, const std::vector<PpoSample>& batch,
                      const PpoConfig& config, Policy* grads);

struct TrainCurvePoint {
  int step{0};
  double mean_reward{0.0};
};

struct PpoResult {
  Policy policy;
  std::vector<TrainCurvePoint> curve;
};

PpoResult train_ppo(const SatCentricEnv& env, PolicyKind kind, const PpoConfig& config,
                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// MCTS (PUCT) over any RolloutEnv, with priors/values from an Evaluator.
// ---------------------------------------------------------------------------

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  // Fills `priors` (size action_count, normalized over the legal actions) and
  // returns the value estimate of the environment's current state.
  virtual double evaluate(const RolloutEnv& env, std::vector<double>& priors) = 0;
};

// Uniform priors, zero value: plain UCT baseline.
class UniformEvaluator final : public Evaluator {
 public:
  double evaluate(const RolloutEnv& env, std::vector<double>& priors) override;
};

// Priors = softmax of the policy logits over legal actions; value head value.
class PolicyEvaluator final : public Evaluator {
 public:
  explicit PolicyEvaluator(const Policy* policy) : policy_(policy) {}
  double evaluate(const RolloutEnv& env, std::vector<double>& priors) override;

 private:
  const Policy* policy_;
};

struct MctsConfig {
  int n_simulations{64};
  double c_puct{1.5};
};

struct MctsResult {
  std::vector<int> visits;  // per action at the root; empty if root terminal
  std::vector<double> pi;   // visits normalized; empty if root terminal
  double root_value{0.0};
};

MctsResult mcts_search(const RolloutEnv& root, Evaluator& evaluator, const MctsConfig& config,
                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// AlphaZero-style self-play training of the hybrid nets.
// ---------------------------------------------------------------------------

struct AlphaZeroConfig {
  int episodes{200};
  int n_simulations{32};
  double c_puct{1.5};
  double lr{1e-3};
  int batch{64};
  int train_steps_per_episode{8};
  double temperature{1.0};
  std::size_t buffer_capacity{20000};
  double time_limit_s{1e18};
};

struct AlphaZeroResult {
  Policy policy;
  std::vector<TrainCurvePoint> curve;          // episode index, normalized reward
  std::vector<double> policy_loss_history;     // per outer training step
};

AlphaZeroResult train_alphazero(const SatCentricEnv& env, const AlphaZeroConfig& config,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Deployment
// ---------------------------------------------------------------------------

// Argmax-policy rollout over every satellite of the instance.
Plan plan_with_policy(const ProblemInstance& instance, const Policy& policy);

// Per-step tree search (argmax visit counts) over every satellite.
Plan plan_with_mcts(const ProblemInstance& instance, const Policy& policy,
                    const MctsConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Checkpoints and learning curves
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> serialize_policy(const Policy& p);
Policy deserialize_policy(const std::vector<std::uint8_t>& blob);
std::string curve_csv(const std::vector<TrainCurvePoint>& curve);

}  // namespace orbitsched
