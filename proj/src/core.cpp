#include "rmab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmab/errors.hpp"

namespace rmab {

std::size_t RngStream::uniform_index(std::size_t n) {
  // Rejection keeps the draw unbiased for any n.
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % range);
}

double RngStream::normal(double mean, double stddev) {
  if (stddev == 0.0) return mean;
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TransitionKernel validate_kernel(const std::vector<std::vector<double>>& matrix) {
  const std::size_t n = matrix.size();
  if (n == 0) throw ShapeError("transition kernel is empty");
  TransitionKernel k;
  k.n_ = n;
  k.p_.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (matrix[r].size() != n) throw ShapeError("transition kernel is not square");
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double v = matrix[r][c];
      if (!(v >= 0.0 && v <= 1.0)) throw NegativeEntryError(r, c);
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) throw RowSumError(r, sum);
    for (std::size_t c = 0; c < n; ++c) k.p_[r * n + c] = matrix[r][c] / sum;
  }
  return k;
}

TransitionKernel TransitionKernel::transposed() const {
  TransitionKernel t = *this;
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c) t.p_[c * n_ + r] = p_[r * n_ + c];
  return t;
}

std::vector<std::vector<double>> TransitionKernel::to_rows() const {
  std::vector<std::vector<double>> rows(n_);
  for (std::size_t r = 0; r < n_; ++r) rows[r].assign(row(r).begin(), row(r).end());
  return rows;
}

ArmModel::ArmModel(TransitionKernel passive, TransitionKernel active, RewardTable rewards,
                   std::string category)
    : passive_(std::move(passive)),
      active_(std::move(active)),
      rewards_(std::move(rewards)),
      category_(std::move(category)) {
  if (passive_.size() != active_.size())
    throw ShapeError("passive and active kernels differ in size");
  if (rewards_.size() != passive_.size())
    throw ShapeError("reward table rows must match the state count");
  for (const auto& row : rewards_)
    for (double r : row)
      if (!std::isfinite(r)) throw ShapeError("reward table has a non-finite entry");
}

double ArmModel::max_abs_reward() const {
  double m = 0.0;
  for (const auto& row : rewards_) m = std::max({m, std::abs(row[0]), std::abs(row[1])});
  return m;
}

StateIndex sample_next_state(const ArmModel& arm, StateIndex s, ActionFlag a, RngStream& rng) {
  const auto row = arm.kernel(a).row(s);
  const double u = rng.uniform();
  double acc = 0.0;
  StateIndex last_positive = 0;
  for (StateIndex j = 0; j < row.size(); ++j) {
    if (row[j] <= 0.0) continue;
    acc += row[j];
    last_positive = j;
    if (u < acc) return j;
  }
  // Rounding left acc slightly below 1.
  return last_positive;
}

void ArmEnsemble::check() const {
  if (arms.size() != states.size()) throw ShapeError("arms and states differ in length");
  if (budget_m < 1 || budget_m > arms.size()) throw ShapeError("budget must lie in [1, N]");
  for (std::size_t i = 0; i < arms.size(); ++i)
    if (states[i] >= arms[i].num_states()) throw ShapeError("state out of range");
}

void require_exact_budget(std::span<const ActionFlag> actions, std::size_t m) {
  const auto count = static_cast<std::size_t>(
      std::count(actions.begin(), actions.end(), ActionFlag::Active));
  if (count != m) throw BudgetViolation(count, m);
}

StepResult step_ensemble(ArmEnsemble& ensemble, std::span<const ActionFlag> actions,
                         RngStream& rng) {
  if (actions.size() != ensemble.size()) throw ShapeError("one action per arm required");
  require_exact_budget(actions, ensemble.budget_m);
  StepResult out;
  out.rewards.resize(ensemble.size());
  out.next_states.resize(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& arm = ensemble.arms[i];
    const StateIndex s = ensemble.states[i];
    out.rewards[i] = reward_of(arm, s, actions[i]);
    out.next_states[i] = sample_next_state(arm, s, actions[i], rng);
  }
  ensemble.states = out.next_states;
  return out;
}

nlohmann::json arm_to_json(const ArmModel& arm) {
  nlohmann::json rewards = nlohmann::json::array();
  for (const auto& row : arm.rewards()) rewards.push_back({row[0], row[1]});
  return {{"states", arm.num_states()},
          {"passive", arm.passive().to_rows()},
          {"active", arm.active().to_rows()},
          {"rewards", rewards},
          {"category", arm.category()}};
}

ArmModel arm_from_json(const nlohmann::json& j) {
  const auto n = j.at("states").get<std::size_t>();
  auto passive = validate_kernel(j.at("passive").get<std::vector<std::vector<double>>>());
  auto active = validate_kernel(j.at("active").get<std::vector<std::vector<double>>>());
  if (passive.size() != n) throw ShapeError("'states' does not match the kernel size");
  RewardTable rewards;
  for (const auto& row : j.at("rewards")) {
    if (row.size() != 2) throw ShapeError("reward rows need [passive, active]");
    rewards.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return ArmModel(std::move(passive), std::move(active), std::move(rewards),
                  j.value("category", std::string("A")));
}

}  // namespace rmab
