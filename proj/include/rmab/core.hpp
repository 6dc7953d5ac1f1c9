#pragma once

// Per-arm MDP primitives and the coupled ensemble step.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace rmab {

/// Index into one arm's state space.
using StateIndex = std::size_t;

enum class ActionFlag : std::uint8_t { Passive = 0, Active = 1 };

inline constexpr std::size_t to_index(ActionFlag a) { return static_cast<std::size_t>(a); }

/// Rows may deviate from 1 by at most this much before being rejected.
inline constexpr double kRowSumTolerance = 1e-9;

/// Seeded generator; equal seeds give equal draw sequences on one build.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);

  double normal(double mean, double stddev);

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Row-stochastic square matrix stored row-major.
class TransitionKernel {
 public:
  TransitionKernel() = default;

  std::size_t size() const { return n_; }
  double operator()(std::size_t row, std::size_t col) const { return p_[row * n_ + col]; }
  std::span<const double> row(std::size_t r) const { return {p_.data() + r * n_, n_}; }

  TransitionKernel transposed() const;
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const TransitionKernel&, const TransitionKernel&) = default;

 private:
  friend TransitionKernel validate_kernel(const std::vector<std::vector<double>>& matrix);
  std::size_t n_ = 0;
  std::vector<double> p_;
};

/// Checks squareness, entry range and row sums; renormalizes rows that are
/// within kRowSumTolerance of 1.
TransitionKernel validate_kernel(const std::vector<std::vector<double>>& matrix);

/// R(s, a) for a in {passive, active}.
using RewardTable = std::vector<std::array<double, 2>>;

class ArmModel {
 public:
  ArmModel() = default;
  ArmModel(TransitionKernel passive, TransitionKernel active, RewardTable rewards,
           std::string category);

  std::size_t num_states() const { return passive_.size(); }
  const TransitionKernel& passive() const { return passive_; }
  const TransitionKernel& active() const { return active_; }
  const TransitionKernel& kernel(ActionFlag a) const {
    return a == ActionFlag::Active ? active_ : passive_;
  }
  const RewardTable& rewards() const { return rewards_; }
  const std::string& category() const { return category_; }

  /// Largest |R(s, a)| over the table.
  double max_abs_reward() const;

  friend bool operator==(const ArmModel&, const ArmModel&) = default;

 private:
  TransitionKernel passive_;
  TransitionKernel active_;
  RewardTable rewards_;
  std::string category_;
};

/// Draws s' from row s of the kernel selected by a. Consumes exactly one uniform.
StateIndex sample_next_state(const ArmModel& arm, StateIndex s, ActionFlag a, RngStream& rng);

inline double reward_of(const ArmModel& arm, StateIndex s, ActionFlag a) {
  return arm.rewards()[s][to_index(a)];
}

struct ArmEnsemble {
  std::vector<ArmModel> arms;
  std::vector<StateIndex> states;
  std::size_t budget_m = 1;

  std::size_t size() const { return arms.size(); }
  /// Throws ShapeError when the invariants do not hold.
  void check() const;
};

struct StepResult {
  std::vector<double> rewards;
  std::vector<StateIndex> next_states;
};

/// Advances every arm once. Rewards are taken at the pre-transition state.
/// Requires exactly budget_m active flags.
StepResult step_ensemble(ArmEnsemble& ensemble, std::span<const ActionFlag> actions,
                         RngStream& rng);

/// Throws BudgetViolation unless exactly m entries are active.
void require_exact_budget(std::span<const ActionFlag> actions, std::size_t m);

nlohmann::json arm_to_json(const ArmModel& arm);
ArmModel arm_from_json(const nlohmann::json& j);

}  // namespace rmab
