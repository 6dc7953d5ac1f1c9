#include "rmab/environment.hpp"

#include "rmab/errors.hpp"

namespace rmab {

MatrixEnvironment::MatrixEnvironment(std::vector<ArmModel> arms, std::size_t budget_m,
                                     std::uint64_t seed)
    : rng_(seed) {
  ensemble_.arms = std::move(arms);
  ensemble_.budget_m = budget_m;
  ensemble_.states.resize(ensemble_.arms.size());
  for (std::size_t i = 0; i < ensemble_.arms.size(); ++i)
    ensemble_.states[i] = rng_.uniform_index(ensemble_.arms[i].num_states());
  ensemble_.check();
  delays_.assign(ensemble_.arms.size(), 0);
}

std::vector<std::size_t> MatrixEnvironment::state_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& arm : ensemble_.arms) out.push_back(arm.num_states());
  return out;
}

std::vector<std::string> MatrixEnvironment::categories() const {
  std::vector<std::string> out;
  for (const auto& arm : ensemble_.arms) out.push_back(arm.category());
  return out;
}

StepResult MatrixEnvironment::step(std::span<const ActionFlag> actions) {
  auto result = step_ensemble(ensemble_, actions, rng_);
  for (std::size_t i = 0; i < actions.size(); ++i)
    delays_[i] = actions[i] == ActionFlag::Active ? 0 : delays_[i] + 1;
  return result;
}

bool MatrixEnvironment::apply_dynamic_switch() {
  ensemble_.arms = rmab::apply_dynamic_switch(ensemble_.arms);
  return true;
}

// ---------------------------------------------------------------------------

SensingEnvironment::SensingEnvironment(const CategoryMix& mix, std::size_t budget_m,
                                       const sensing::SensingParams& params, std::uint64_t seed,
                                       std::shared_ptr<const sensing::TraceTable> trace)
    : budget_m_(budget_m),
      disc_(params.discretization),
      trace_(std::move(trace)),
      reading_rng_(mix_seed(seed, 1)),
      channel_rng_(mix_seed(seed, 2)) {
  for (const auto& [label, count] : mix)
    for (std::size_t k = 0; k < count; ++k) {
      traces_.push_back(sensing::default_trace(label, params.amplitude));
      success_.push_back(params.success_for(label));
    }
  if (budget_m_ < 1 || budget_m_ > traces_.size())
    throw ShapeError("budget must lie in [1, N]");
  nodes_.resize(traces_.size());
  sinks_.resize(traces_.size());
  for (std::size_t i = 0; i < traces_.size(); ++i) {
    nodes_[i].beta1 = params.beta1;
    nodes_[i].beta2 = params.beta2;
    nodes_[i].x1 = read(i);
    nodes_[i].x2 = 0.0;
    sinks_[i] = {nodes_[i].x1, nodes_[i].x2, 0};
  }
  states_.assign(traces_.size(), 0);
  delays_.assign(traces_.size(), 0);
  refresh_observation();
}

double SensingEnvironment::read(std::size_t i) {
  if (trace_) return trace_->reading(i, t_);
  return sensing::simulate_temperature(traces_[i], t_, reading_rng_);
}

std::vector<std::size_t> SensingEnvironment::state_sizes() const {
  return std::vector<std::size_t>(traces_.size(), disc_.n_bins);
}

std::vector<std::string> SensingEnvironment::categories() const {
  std::vector<std::string> out;
  for (const auto& tr : traces_) out.push_back(tr.category);
  return out;
}

std::vector<double> SensingEnvironment::aoii() const {
  std::vector<double> out(sinks_.size());
  for (std::size_t i = 0; i < sinks_.size(); ++i) out[i] = sensing::aoii_delta(sinks_[i], t_);
  return out;
}

void SensingEnvironment::refresh_observation() {
  for (std::size_t i = 0; i < sinks_.size(); ++i) {
    states_[i] = sensing::discretize_aoii(sensing::aoii_delta(sinks_[i], t_), disc_);
    delays_[i] = static_cast<std::size_t>(sensing::aoi_of(sinks_[i], t_));
  }
}

StepResult SensingEnvironment::step(std::span<const ActionFlag> actions) {
  if (actions.size() != traces_.size()) throw ShapeError("one action per sensor required");
  require_exact_budget(actions, budget_m_);
  StepResult out;
  out.rewards.resize(traces_.size());
  for (std::size_t i = 0; i < traces_.size(); ++i) {
    out.rewards[i] = -sensing::aoii_delta(sinks_[i], t_);
    if (actions[i] == ActionFlag::Active &&
        sensing::channel_transmit({success_[i]}, channel_rng_))
      sinks_[i] = {nodes_[i].x1, nodes_[i].x2, t_};
  }
  ++t_;
  for (std::size_t i = 0; i < traces_.size(); ++i)
    nodes_[i] = sensing::dewma_update(nodes_[i], read(i), 1.0);
  refresh_observation();
  out.next_states = states_;
  return out;
}

}  // namespace rmab
