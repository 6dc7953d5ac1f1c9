#pragma once

// Exact Whittle indices for a known arm: bisection on the activation penalty
// with average-reward relative value iteration as the inner solver.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rmab/core.hpp"

namespace rmab {

struct PenalizedValueFunction {
  std::vector<double> v;  // relative values, v[0] == 0
  double gain = 0.0;
  double lambda_penalty = 0.0;
  std::int64_t iterations = 0;
};

struct SolverOptions {
  double value_tol = 1e-9;         // span-seminorm stopping threshold
  std::int64_t max_iters = 100000;
  double lambda_tol = 1e-6;        // final bisection bracket width
  int max_expansions = 60;
};

/// Relative value iteration for the single-arm problem where the active
/// action costs lambda_penalty. Throws NoConvergence.
PenalizedValueFunction solve_penalized_mdp(const ArmModel& arm, double lambda_penalty,
                                           double tol = 1e-9, std::int64_t max_iters = 100000);

/// Q(s, a) = R(s, a) - lambda * a + sum_s' P^a(s, s') v(s') - gain.
double penalized_q(const ArmModel& arm, const PenalizedValueFunction& vf, StateIndex s,
                   ActionFlag a);

/// Q(s, 1) - Q(s, 0) under the solved values.
double indifference_gap(const ArmModel& arm, const PenalizedValueFunction& vf, StateIndex s);

/// Greedy action per state under vf (ties go to passive).
std::vector<ActionFlag> greedy_policy(const ArmModel& arm, const PenalizedValueFunction& vf);

/// Penalty at which state s is indifferent between actions. The bracket
/// doubles outward up to max_expansions times; throws BracketFailure.
double whittle_index_of_state(const ArmModel& arm, StateIndex s,
                              std::pair<double, double> bracket,
                              const SolverOptions& opts = {});

struct WhittleTable {
  std::vector<double> indices;
  std::vector<bool> converged;
  std::vector<int> iterations_used;  // bisection steps per state
};

/// Indices for every state using the default bracket +-(1 + max |R|).
/// States whose bracket search fails are marked unconverged.
WhittleTable solve_whittle_table(const ArmModel& arm, const SolverOptions& opts = {});

struct IndexabilityReport {
  bool indexable = true;
  /// First grid pair (lambda_k, lambda_k+1) where the passive set shrank.
  std::optional<std::pair<double, double>> violation;
  std::vector<std::vector<bool>> passive_sets;  // one per grid point
};

IndexabilityReport indexability_check(const ArmModel& arm, std::span<const double> lambda_grid,
                                      const SolverOptions& opts = {});

/// Solves one table per distinct arm model and returns one table per arm.
/// The parallel variant distributes distinct models over OpenMP threads and
/// must agree exactly with the serial reference.
std::vector<WhittleTable> solve_tables(const std::vector<ArmModel>& arms,
                                       const SolverOptions& opts = {});
std::vector<WhittleTable> solve_tables_serial(const std::vector<ArmModel>& arms,
                                              const SolverOptions& opts = {});

/// Top-m arms by lambda_i(s_i), ties uniform.
std::vector<ActionFlag> oracle_policy(std::span<const WhittleTable> tables,
                                      std::span<const StateIndex> states, std::size_t m,
                                      RngStream& rng);

}  // namespace rmab
