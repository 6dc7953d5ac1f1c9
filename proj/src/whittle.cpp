#include "rmab/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmab/errors.hpp"
#include "rmab/selection.hpp"

namespace rmab {
namespace {

// Iterating on P~ = tau*I + (1 - tau)*P leaves the gain unchanged, scales the
// relative values by 1/(1 - tau), and makes every unichain arm aperiodic.
constexpr double kAperiodicity = 0.5;

double expected_value(std::span<const double> row, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * v[j];
  return acc;
}

}  // namespace

PenalizedValueFunction solve_penalized_mdp(const ArmModel& arm, double lambda_penalty,
                                           double tol, std::int64_t max_iters) {
  if (!(tol > 0.0)) throw ConfigError("value-iteration tolerance must be positive");
  const std::size_t n = arm.num_states();
  std::vector<double> h(n, 0.0), next(n, 0.0);
  const double keep = kAperiodicity;
  const double move = 1.0 - kAperiodicity;
  double span = std::numeric_limits<double>::infinity();
  for (std::int64_t it = 1; it <= max_iters; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t s = 0; s < n; ++s) {
      const double q0 = reward_of(arm, s, ActionFlag::Passive) +
                        move * expected_value(arm.passive().row(s), h) + keep * h[s];
      const double q1 = reward_of(arm, s, ActionFlag::Active) - lambda_penalty +
                        move * expected_value(arm.active().row(s), h) + keep * h[s];
      next[s] = std::max(q0, q1);
      const double d = next[s] - h[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    span = hi - lo;
    const double ref = next[0];
    for (std::size_t s = 0; s < n; ++s) h[s] = next[s] - ref;
    if (span < tol) {
      PenalizedValueFunction out;
      out.gain = ref;  // h[0] was 0 before this sweep
      out.lambda_penalty = lambda_penalty;
      out.iterations = it;
      out.v.resize(n);
      for (std::size_t s = 0; s < n; ++s) out.v[s] = move * h[s];
      return out;
    }
  }
  throw NoConvergence(max_iters, span);
}

double penalized_q(const ArmModel& arm, const PenalizedValueFunction& vf, StateIndex s,
                   ActionFlag a) {
  const double penalty = a == ActionFlag::Active ? vf.lambda_penalty : 0.0;
  return reward_of(arm, s, a) - penalty + expected_value(arm.kernel(a).row(s), vf.v) - vf.gain;
}

double indifference_gap(const ArmModel& arm, const PenalizedValueFunction& vf, StateIndex s) {
  return penalized_q(arm, vf, s, ActionFlag::Active) - penalized_q(arm, vf, s, ActionFlag::Passive);
}

std::vector<ActionFlag> greedy_policy(const ArmModel& arm, const PenalizedValueFunction& vf) {
  std::vector<ActionFlag> pi(arm.num_states());
  for (StateIndex s = 0; s < pi.size(); ++s)
    pi[s] = indifference_gap(arm, vf, s) > 0.0 ? ActionFlag::Active : ActionFlag::Passive;
  return pi;
}

namespace {

double bisect_index(const ArmModel& arm, StateIndex s, std::pair<double, double> bracket,
                    const SolverOptions& opts, int& steps) {
  if (s >= arm.num_states()) throw ShapeError("state out of range");
  const auto gap = [&](double lambda) {
    return indifference_gap(arm, solve_penalized_mdp(arm, lambda, opts.value_tol, opts.max_iters),
                            s);
  };
  auto [lo, hi] = bracket;
  if (!(lo < hi)) throw ConfigError("bracket must satisfy lo < hi");
  double g_lo = gap(lo);
  double g_hi = gap(hi);
  int expansions = 0;
  while (!(g_lo >= 0.0 && g_hi <= 0.0)) {
    if (expansions++ >= opts.max_expansions) throw BracketFailure(s);
    const double width = hi - lo;
    if (g_lo < 0.0) {
      lo -= width;
      g_lo = gap(lo);
    }
    if (g_hi > 0.0) {
      hi += width;
      g_hi = gap(hi);
    }
  }
  // The gap falls through zero as the penalty grows; keep gap(lo) > 0 >= gap(hi)
  // so the smallest indifference point is returned.
  steps = 0;
  while (hi - lo > opts.lambda_tol) {
    ++steps;
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double whittle_index_of_state(const ArmModel& arm, StateIndex s,
                              std::pair<double, double> bracket, const SolverOptions& opts) {
  int steps = 0;
  return bisect_index(arm, s, bracket, opts, steps);
}

WhittleTable solve_whittle_table(const ArmModel& arm, const SolverOptions& opts) {
  const double r = 1.0 + arm.max_abs_reward();
  WhittleTable table;
  const std::size_t n = arm.num_states();
  table.indices.assign(n, std::numeric_limits<double>::quiet_NaN());
  table.converged.assign(n, false);
  table.iterations_used.assign(n, 0);
  for (StateIndex s = 0; s < n; ++s) {
    try {
      table.indices[s] = bisect_index(arm, s, {-r, r}, opts, table.iterations_used[s]);
      table.converged[s] = true;
    } catch (const BracketFailure&) {
      table.converged[s] = false;
    }
  }
  return table;
}

IndexabilityReport indexability_check(const ArmModel& arm, std::span<const double> lambda_grid,
                                      const SolverOptions& opts) {
  constexpr double kTieTol = 1e-9;
  IndexabilityReport report;
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    const auto vf = solve_penalized_mdp(arm, lambda_grid[k], opts.value_tol, opts.max_iters);
    std::vector<bool> passive(arm.num_states());
    for (StateIndex s = 0; s < passive.size(); ++s)
      passive[s] = indifference_gap(arm, vf, s) <= kTieTol;
    if (!report.passive_sets.empty() && report.indexable) {
      const auto& prev = report.passive_sets.back();
      for (StateIndex s = 0; s < passive.size(); ++s) {
        if (prev[s] && !passive[s]) {
          report.indexable = false;
          report.violation = std::make_pair(lambda_grid[k - 1], lambda_grid[k]);
          break;
        }
      }
    }
    report.passive_sets.push_back(std::move(passive));
  }
  return report;
}

namespace {

struct DistinctArms {
  std::vector<const ArmModel*> models;
  std::vector<std::size_t> model_of_arm;
};

DistinctArms dedupe(const std::vector<ArmModel>& arms) {
  DistinctArms d;
  d.model_of_arm.reserve(arms.size());
  for (const auto& arm : arms) {
    std::size_t k = 0;
    while (k < d.models.size() && !(*d.models[k] == arm)) ++k;
    if (k == d.models.size()) d.models.push_back(&arm);
    d.model_of_arm.push_back(k);
  }
  return d;
}

std::vector<WhittleTable> expand(const DistinctArms& d, const std::vector<WhittleTable>& solved) {
  std::vector<WhittleTable> out;
  out.reserve(d.model_of_arm.size());
  for (std::size_t k : d.model_of_arm) out.push_back(solved[k]);
  return out;
}

}  // namespace

std::vector<WhittleTable> solve_tables_serial(const std::vector<ArmModel>& arms,
                                              const SolverOptions& opts) {
  const auto d = dedupe(arms);
  std::vector<WhittleTable> solved(d.models.size());
  for (std::size_t k = 0; k < d.models.size(); ++k)
    solved[k] = solve_whittle_table(*d.models[k], opts);
  return expand(d, solved);
}

std::vector<WhittleTable> solve_tables(const std::vector<ArmModel>& arms,
                                       const SolverOptions& opts) {
  const auto d = dedupe(arms);
  const auto count = static_cast<std::ptrdiff_t>(d.models.size());
  std::vector<WhittleTable> solved(d.models.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k)
    solved[static_cast<std::size_t>(k)] =
        solve_whittle_table(*d.models[static_cast<std::size_t>(k)], opts);
  return expand(d, solved);
}

std::vector<ActionFlag> oracle_policy(std::span<const WhittleTable> tables,
                                      std::span<const StateIndex> states, std::size_t m,
                                      RngStream& rng) {
  if (tables.size() != states.size()) throw ShapeError("one table per arm required");
  std::vector<double> scores(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) scores[i] = tables[i].indices[states[i]];
  return top_m_actions(scores, m, rng);
}

}  // namespace rmab
