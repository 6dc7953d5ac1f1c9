#pragma once

// Steppable environments the harness drives: the matrix benchmarks and the
// sensor-monitoring pipeline.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmab/core.hpp"
#include "rmab/envs.hpp"
#include "rmab/sensing.hpp"

namespace rmab {

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t num_arms() const = 0;
  virtual std::size_t budget() const = 0;
  virtual std::vector<std::size_t> state_sizes() const = 0;
  virtual std::vector<std::string> categories() const = 0;
  /// Observed (discrete) state per arm.
  virtual const std::vector<StateIndex>& states() const = 0;
  /// Steps since each arm's last successful update.
  virtual const std::vector<std::size_t>& delays() const = 0;
  /// True models when the environment has them.
  virtual const std::vector<ArmModel>* models() const { return nullptr; }
  /// Rewards are for the pre-transition state; every arm moves.
  virtual StepResult step(std::span<const ActionFlag> actions) = 0;
  /// Swaps category A and B dynamics. Returns false when unsupported.
  virtual bool apply_dynamic_switch() { return false; }
};

/// Arm ensemble driven by its kernels. A delay resets whenever the arm is activated.
class MatrixEnvironment : public Environment {
 public:
  MatrixEnvironment(std::vector<ArmModel> arms, std::size_t budget_m, std::uint64_t seed);

  std::size_t num_arms() const override { return ensemble_.size(); }
  std::size_t budget() const override { return ensemble_.budget_m; }
  std::vector<std::size_t> state_sizes() const override;
  std::vector<std::string> categories() const override;
  const std::vector<StateIndex>& states() const override { return ensemble_.states; }
  const std::vector<std::size_t>& delays() const override { return delays_; }
  const std::vector<ArmModel>* models() const override { return &ensemble_.arms; }
  StepResult step(std::span<const ActionFlag> actions) override;
  bool apply_dynamic_switch() override;

  ArmEnsemble& ensemble() { return ensemble_; }

 private:
  ArmEnsemble ensemble_;
  std::vector<std::size_t> delays_;
  RngStream rng_;
};

/// Sensors sample every step and smooth locally; the sink only learns a
/// node's (level, rate) when polled and the channel delivers. The observed
/// state is the discretized AoII; the reward is minus the continuous AoII.
class SensingEnvironment : public Environment {
 public:
  SensingEnvironment(const CategoryMix& mix, std::size_t budget_m,
                     const sensing::SensingParams& params, std::uint64_t seed,
                     std::shared_ptr<const sensing::TraceTable> trace = nullptr);

  std::size_t num_arms() const override { return traces_.size(); }
  std::size_t budget() const override { return budget_m_; }
  std::vector<std::size_t> state_sizes() const override;
  std::vector<std::string> categories() const override;
  const std::vector<StateIndex>& states() const override { return states_; }
  const std::vector<std::size_t>& delays() const override { return delays_; }
  StepResult step(std::span<const ActionFlag> actions) override;

  std::int64_t time() const { return t_; }
  const std::vector<sensing::SinkEstimate>& sinks() const { return sinks_; }
  const std::vector<sensing::EdgeState>& nodes() const { return nodes_; }
  /// Continuous AoII per sensor at the current time.
  std::vector<double> aoii() const;

 private:
  double read(std::size_t i);
  void refresh_observation();

  std::vector<sensing::SensorTrace> traces_;
  std::vector<sensing::EdgeState> nodes_;
  std::vector<sensing::SinkEstimate> sinks_;
  std::vector<double> success_;
  std::vector<StateIndex> states_;
  std::vector<std::size_t> delays_;
  std::size_t budget_m_;
  sensing::DiscretizationSpec disc_;
  std::shared_ptr<const sensing::TraceTable> trace_;
  RngStream reading_rng_;
  RngStream channel_rng_;
  std::int64_t t_ = 0;
};

}  // namespace rmab
