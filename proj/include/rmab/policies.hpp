#pragma once

// Scheduling policies behind one interface: observe the per-arm states, emit
// an action vector with exactly M active flags, then learn from every arm's
// transition.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmab/core.hpp"
#include "rmab/whittle.hpp"

namespace rmab {

struct Observation {
  std::span<const StateIndex> states;
  std::span<const std::size_t> delays;  // steps since each arm's last successful update
  std::int64_t t = 1;                   // 1-based decision step
};

struct TransitionBatch {
  std::span<const StateIndex> states;
  std::span<const ActionFlag> actions;
  std::span<const double> rewards;
  std::span<const StateIndex> next_states;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) = 0;
  virtual void update(const TransitionBatch& /*batch*/) {}
  /// Called when the environment's dynamics change. Only informed policies react.
  virtual void on_dynamics_change(const std::vector<ArmModel>& /*arms*/) {}
  /// Number of persistent scalars the policy retains.
  virtual std::size_t stored_values() const = 0;
  virtual nlohmann::json snapshot() const { return nlohmann::json::object(); }
};

enum class PolicyKind {
  Oracle,
  WiqlUcb,
  WiqlBiswas,
  WiqlAb,
  WiqlFu,
  JointQ,
  Greedy,
  RoundRobin,
  AoiGreedy,
};

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::WiqlUcb;
  std::string label;  // defaults to the kind name

  double gamma = 1.0;  // discount on the Q target; 1 follows the undiscounted update

  // epsilon-greedy (Biswas: eps_t = epsilon0 * N / (N + t); joint Q: multiplicative decay)
  std::optional<double> epsilon0;
  double eps_min = 0.01;
  double eps_decay = 0.95;

  // two-timescale: fast 1/(1 + ceil(c / fast_divisor)), slow slow_rate / (1 + slow_decay * t)
  double fast_divisor = 10.0;
  double slow_rate = 0.01;
  double slow_decay = 0.001;

  // grid search
  double grid_lo = -2.0;
  double grid_hi = 2.0;
  std::size_t grid_points = 21;
  std::size_t eval_window = 1000;

  // joint Q
  double table_cap = 1e7;

  std::string display_name() const { return label.empty() ? to_string(kind) : label; }
  void validate() const;
};

nlohmann::json policy_config_to_json(const PolicyConfig& cfg);
PolicyConfig policy_config_from_json(const nlohmann::json& j);

/// What a policy may know about the environment at construction.
struct EnvContext {
  std::vector<std::size_t> state_sizes;     // |S_i| per arm
  std::size_t budget_m = 1;
  const std::vector<ArmModel>* arms = nullptr;  // true models; null for the sensing env
};

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, const EnvContext& env);

// ---------------------------------------------------------------------------
// Per-arm Q-tables shared by WIQL-UCB and the adaptive-epsilon baseline.

class PerArmQLearner {
 public:
  PerArmQLearner(std::vector<std::size_t> state_sizes, double gamma = 1.0);

  std::size_t num_arms() const { return offsets_.size(); }
  std::size_t num_states(std::size_t arm) const { return sizes_[arm]; }

  double q(std::size_t arm, StateIndex s, ActionFlag a) const {
    return q_[2 * (offsets_[arm] + s) + to_index(a)];
  }
  std::uint64_t count(std::size_t arm, StateIndex s, ActionFlag a) const {
    return c_[2 * (offsets_[arm] + s) + to_index(a)];
  }
  double lambda(std::size_t arm, StateIndex s) const { return lam_[offsets_[arm] + s]; }

  /// Count first, alpha = 1/(1 + c), then
  /// Q <- (1 - alpha) Q + alpha (R + gamma * max_a' Q(s', a')), then lambda refresh.
  void update(std::size_t arm, StateIndex s, ActionFlag a, double reward, StateIndex s_next);
  void update_all(const TransitionBatch& batch);

  /// 2 Q-values + 2 counts + 1 index per state.
  std::size_t stored_values() const { return 5 * lam_.size(); }
  nlohmann::json snapshot() const;

  void set_q(std::size_t arm, StateIndex s, ActionFlag a, double value);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> q_;
  std::vector<std::uint64_t> c_;
  std::vector<double> lam_;
  double gamma_;
};

class WiqlUcbPolicy : public Policy {
 public:
  WiqlUcbPolicy(std::vector<std::size_t> state_sizes, std::size_t m, double gamma = 1.0);

  std::string name() const override { return "wiql_ucb"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  void update(const TransitionBatch& batch) override { learner_.update_all(batch); }
  std::size_t stored_values() const override { return learner_.stored_values(); }
  nlohmann::json snapshot() const override { return learner_.snapshot(); }

  /// lambda_i(s_i) + sqrt(2 log t / (1 + sum_a c_i(s_i, a))).
  std::vector<double> ucb_scores(std::span<const StateIndex> states, double t) const;

  PerArmQLearner& learner() { return learner_; }
  const PerArmQLearner& learner() const { return learner_; }

 private:
  PerArmQLearner learner_;
  std::size_t m_;
};

class WiqlBiswasPolicy : public Policy {
 public:
  WiqlBiswasPolicy(std::vector<std::size_t> state_sizes, std::size_t m, double epsilon0 = 1.0,
                   double gamma = 1.0);

  std::string name() const override { return "wiql_biswas"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  void update(const TransitionBatch& batch) override { learner_.update_all(batch); }
  std::size_t stored_values() const override { return learner_.stored_values(); }
  nlohmann::json snapshot() const override { return learner_.snapshot(); }

  /// epsilon0 * N / (N + t).
  double epsilon(std::int64_t t) const;
  /// Pins epsilon for every step (testing hook).
  void force_epsilon(std::optional<double> eps) { forced_ = eps; }

  PerArmQLearner& learner() { return learner_; }

 private:
  PerArmQLearner learner_;
  std::size_t m_;
  double epsilon0_;
  std::optional<double> forced_;
};

/// Two-timescale learner with tables shared by all arms: one relative-value
/// Q-table per reference state x, learned on the fast clock under penalty
/// lambda(x); lambda(x) drifts on the slow clock toward indifference at x.
class WiqlAbPolicy : public Policy {
 public:
  WiqlAbPolicy(std::vector<std::size_t> state_sizes, std::size_t m, const PolicyConfig& cfg);

  std::string name() const override { return "wiql_ab"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  void update(const TransitionBatch& batch) override;
  std::size_t stored_values() const override;
  nlohmann::json snapshot() const override;

  double lambda(StateIndex x) const { return lam_[x]; }
  double q(StateIndex ref, StateIndex s, ActionFlag a) const {
    return q_[(ref * n_ + s) * 2 + to_index(a)];
  }
  void set_q(StateIndex ref, StateIndex s, ActionFlag a, double value);
  /// One slow-timescale step at decision step t.
  void update_lambdas(std::int64_t t);
  double fast_rate(std::uint64_t count) const;
  double slow_rate(std::int64_t t) const;

 private:
  void fast_update(StateIndex s, ActionFlag a, double reward, StateIndex s_next);

  std::size_t n_;  // shared state-space size
  std::size_t m_;
  PolicyConfig cfg_;
  std::vector<double> q_;           // [ref][s][a]
  std::vector<double> q_sum_;       // per ref, for the mean-offset normalization
  std::vector<std::uint64_t> c_;    // [s][a]
  std::vector<double> lam_;         // [ref]
  std::int64_t t_ = 0;
};

/// Grid search over candidate index values with shared parallel Q-recursions,
/// one per grid value. Every eval_window steps each state's index is re-scored
/// as the grid value whose active/passive gap is smallest.
class WiqlFuPolicy : public Policy {
 public:
  WiqlFuPolicy(std::vector<std::size_t> state_sizes, std::size_t m, const PolicyConfig& cfg);

  std::string name() const override { return "wiql_fu"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  void update(const TransitionBatch& batch) override;
  std::size_t stored_values() const override;
  nlohmann::json snapshot() const override;

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& indices() const { return index_; }
  double q(std::size_t g, StateIndex s, ActionFlag a) const {
    return q_[(g * n_ + s) * 2 + to_index(a)];
  }
  void set_q(std::size_t g, StateIndex s, ActionFlag a, double value);
  /// Re-scores every state against the whole grid.
  void rescore();

 private:
  std::size_t n_;
  std::size_t m_;
  PolicyConfig cfg_;
  std::vector<double> grid_;
  std::vector<double> q_;           // [g][s][a]
  std::vector<double> q_sum_;       // per g
  std::vector<std::uint64_t> c_;    // [s][a]
  std::vector<double> index_;       // [s]
  std::int64_t steps_ = 0;
};

/// Tabular Q-learning over the joint state and the C(N, M) action subsets.
class JointQPolicy : public Policy {
 public:
  JointQPolicy(std::vector<std::size_t> state_sizes, std::size_t m, const PolicyConfig& cfg);

  std::string name() const override { return "joint_q"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  void update(const TransitionBatch& batch) override;
  std::size_t stored_values() const override { return q_.size() + c_.size(); }
  nlohmann::json snapshot() const override;

  std::size_t num_joint_states() const { return num_joint_; }
  std::size_t num_subsets() const { return subsets_.size(); }
  std::size_t table_entries() const { return q_.size(); }
  /// Mixed-radix code, arm 0 most significant.
  std::size_t encode(std::span<const StateIndex> states) const;
  std::size_t subset_index(std::span<const ActionFlag> actions) const;
  const std::vector<std::size_t>& subset(std::size_t k) const { return subsets_[k]; }
  double q(std::size_t joint, std::size_t action) const { return q_[joint * subsets_.size() + action]; }
  void set_q(std::size_t joint, std::size_t action, double value);
  double epsilon() const { return eps_; }
  void force_epsilon(double eps) { eps_ = eps; eps_forced_ = true; }

  /// |S|^N * C(N, M) evaluated in floating point.
  static double required_entries(std::span<const std::size_t> state_sizes, std::size_t m);

 private:
  std::vector<std::size_t> sizes_;
  std::size_t m_;
  PolicyConfig cfg_;
  std::size_t num_joint_ = 1;
  std::vector<std::vector<std::size_t>> subsets_;  // lexicographic
  std::vector<double> q_;
  std::vector<std::uint64_t> c_;
  double eps_;
  bool eps_forced_ = false;
};

/// One-step myopic baseline with the true models: activation advantage
/// [R(s,1) + E_1 R(s',0)] - [R(s,0) + E_0 R(s',0)].
class GreedyPolicy : public Policy {
 public:
  GreedyPolicy(const std::vector<ArmModel>& arms, std::size_t m);

  std::string name() const override { return "greedy"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  void on_dynamics_change(const std::vector<ArmModel>& arms) override;
  std::size_t stored_values() const override { return 0; }

  static double advantage(const ArmModel& arm, StateIndex s);

 private:
  std::vector<std::vector<double>> adv_;
  std::size_t m_;
};

/// Activates arms cursor .. cursor + m - 1 (mod n), then advances the cursor by m.
class RoundRobinPolicy : public Policy {
 public:
  RoundRobinPolicy(std::size_t n, std::size_t m, std::size_t cursor = 0)
      : n_(n), m_(m), cursor_(cursor % n) {}

  std::string name() const override { return "round_robin"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  std::size_t stored_values() const override { return 1; }
  std::size_t cursor() const { return cursor_; }

 private:
  std::size_t n_;
  std::size_t m_;
  std::size_t cursor_;
};

/// Top-m arms by delay since the last successful update; ties uniform.
class AoiGreedyPolicy : public Policy {
 public:
  explicit AoiGreedyPolicy(std::size_t m) : m_(m) {}

  std::string name() const override { return "aoi"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  std::size_t stored_values() const override { return 0; }

 private:
  std::size_t m_;
};

/// Informed benchmark: top-m by exact Whittle indices, re-solved on dynamics change.
class OraclePolicy : public Policy {
 public:
  OraclePolicy(const std::vector<ArmModel>& arms, std::size_t m);

  std::string name() const override { return "oracle"; }
  std::vector<ActionFlag> select(const Observation& obs, RngStream& rng) override;
  void on_dynamics_change(const std::vector<ArmModel>& arms) override;
  std::size_t stored_values() const override;
  nlohmann::json snapshot() const override;
  const std::vector<WhittleTable>& tables() const { return tables_; }

 private:
  std::vector<WhittleTable> tables_;
  std::size_t m_;
};

}  // namespace rmab
