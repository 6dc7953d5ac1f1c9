#include <cmath>
#include <limits>

#include "doctest.h"
#include "rmab/envs.hpp"
#include "rmab/errors.hpp"
#include "rmab/whittle.hpp"

using namespace rmab;

namespace {

// Independent reference: enumerate every deterministic policy, evaluate it
// exactly under a discount close to 1 by a linear solve, and take the
// componentwise best. Indices and gains converge to the average-reward ones
// as the discount goes to 1.
constexpr double kGamma = 1.0 - 1e-7;

std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * x[k];
    x[i] = acc / a[i][i];
  }
  return x;
}

double step_value(const ArmModel& arm, const std::vector<double>& v, StateIndex s, ActionFlag a,
                  double lambda) {
  double next = 0.0;
  for (StateIndex j = 0; j < arm.num_states(); ++j) next += arm.kernel(a)(s, j) * v[j];
  return reward_of(arm, s, a) - (a == ActionFlag::Active ? lambda : 0.0) + kGamma * next;
}

std::vector<double> best_values(const ArmModel& arm, double lambda) {
  const std::size_t n = arm.num_states();
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  for (unsigned p = 0; p < (1u << n); ++p) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n);
    for (StateIndex s = 0; s < n; ++s) {
      const auto act = (p >> s) & 1u ? ActionFlag::Active : ActionFlag::Passive;
      for (StateIndex j = 0; j < n; ++j) a[s][j] = -kGamma * arm.kernel(act)(s, j);
      a[s][s] += 1.0;
      b[s] = reward_of(arm, s, act) - (act == ActionFlag::Active ? lambda : 0.0);
    }
    const auto v = solve_linear(a, b);
    for (StateIndex s = 0; s < n; ++s) best[s] = std::max(best[s], v[s]);
  }
  return best;
}

double enumerated_gain(const ArmModel& arm, double lambda) {
  return (1.0 - kGamma) * best_values(arm, lambda)[0];
}

double enumerated_gap(const ArmModel& arm, StateIndex s, double lambda) {
  const auto v = best_values(arm, lambda);
  return step_value(arm, v, s, ActionFlag::Active, lambda) -
         step_value(arm, v, s, ActionFlag::Passive, lambda);
}

double enumerated_index(const ArmModel& arm, StateIndex s) {
  double lo = -1.0, hi = 1.0;
  while (enumerated_gap(arm, s, lo) <= 0.0 && lo > -1e4) lo *= 2.0;
  while (enumerated_gap(arm, s, hi) > 0.0 && hi < 1e4) hi *= 2.0;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    if (enumerated_gap(arm, s, mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

ArmModel identical_action_arm() {
  auto base = build_circulant(1).front();
  return ArmModel(base.passive(), base.passive(), base.rewards(), "A");
}

}  // namespace

TEST_SUITE("whittle") {
  TEST_CASE("overwhelming penalty or subsidy fixes the greedy policy") {
    auto arm = build_circulant(1).front();
    auto off = greedy_policy(arm, solve_penalized_mdp(arm, 1e6));
    auto on = greedy_policy(arm, solve_penalized_mdp(arm, -1e6));
    for (auto a : off) CHECK(a == ActionFlag::Passive);
    for (auto a : on) CHECK(a == ActionFlag::Active);
  }

  TEST_CASE("relative values are pinned at state 0") {
    auto arm = build_circulant(1).front();
    auto vf = solve_penalized_mdp(arm, 0.3);
    CHECK(vf.v[0] == 0.0);
    CHECK(vf.lambda_penalty == 0.3);
  }

  TEST_CASE("gain at zero penalty matches a long simulation of the greedy policy") {
    auto arm = build_circulant(1).front();
    auto vf = solve_penalized_mdp(arm, 0.0);
    auto pol = greedy_policy(arm, vf);
    RngStream rng(21);
    StateIndex s = 0;
    double total = 0.0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
      total += reward_of(arm, s, pol[s]);
      s = sample_next_state(arm, s, pol[s], rng);
    }
    CHECK(std::abs(total / n - vf.gain) < 0.01);
  }

  TEST_CASE("gain agrees with policy enumeration") {
    for (const auto& arm : {build_circulant(1).front(), build_restart(1).front()}) {
      for (double lam : {-0.7, 0.0, 0.4, 1.3}) {
        CHECK(std::abs(solve_penalized_mdp(arm, lam).gain - enumerated_gain(arm, lam)) < 1e-4);
      }
    }
  }

  TEST_CASE("circulant indices agree with policy enumeration") {
    auto arm = build_circulant(1).front();
    auto table = solve_whittle_table(arm);
    for (StateIndex s = 0; s < 4; ++s) {
      CHECK(table.converged[s]);
      CHECK(std::abs(table.indices[s] - enumerated_index(arm, s)) < 1e-3);
    }
    // exact average-reward values of this arm
    const double expected[] = {-0.5, 0.5, 1.0, -1.0};
    for (StateIndex s = 0; s < 4; ++s) CHECK(std::abs(table.indices[s] - expected[s]) < 1e-3);
  }

  TEST_CASE("indices agree with enumeration on the other small benchmarks") {
    std::vector<ArmModel> arms = build_restart(1);
    for (const auto& a : build_process_update({{"A", 1}, {"B", 1}, {"C", 1}})) arms.push_back(a);
    for (const auto& a : build_maternal_health({{"A", 1}, {"B", 1}, {"C", 1}})) arms.push_back(a);
    for (const auto& arm : arms) {
      auto table = solve_whittle_table(arm);
      for (StateIndex s = 0; s < arm.num_states(); ++s)
        CHECK_MESSAGE(std::abs(table.indices[s] - enumerated_index(arm, s)) < 1e-3,
                      arm.category() << " state " << s);
    }
  }

  TEST_CASE("identical actions give zero indices") {
    auto table = solve_whittle_table(identical_action_arm());
    for (double x : table.indices) CHECK(std::abs(x) < 1e-5);
  }

  TEST_CASE("restart indices increase with the state") {
    auto table = solve_whittle_table(build_restart(1, 0.9).front());
    for (StateIndex s = 1; s < 5; ++s) CHECK(table.indices[s] > table.indices[s - 1]);
  }

  TEST_CASE("indexability on the benchmark arms") {
    std::vector<double> grid;
    for (int k = 0; k <= 8; ++k) grid.push_back(-2.0 + 0.5 * k);
    CHECK(indexability_check(build_circulant(1).front(), grid).indexable);
    CHECK(indexability_check(identical_action_arm(), grid).indexable);
    CHECK(indexability_check(build_restart(1).front(), grid).indexable);
  }

  TEST_CASE("indexability flags a shrinking passive set") {
    // Passive sets must only grow with the penalty; feed a descending grid
    // so the reported sets shrink.
    std::vector<double> grid = {2.0, -2.0};
    auto rep = indexability_check(build_circulant(1).front(), grid);
    CHECK_FALSE(rep.indexable);
    REQUIRE(rep.violation.has_value());
    CHECK(rep.violation->first == 2.0);
  }

  TEST_CASE("iteration cap raises NoConvergence") {
    CHECK_THROWS_AS(solve_penalized_mdp(build_circulant(1).front(), 0.0, 1e-12, 2),
                    NoConvergence);
  }

  TEST_CASE("narrow bracket expands") {
    auto arm = build_circulant(1).front();
    CHECK(whittle_index_of_state(arm, 2, {-0.01, 0.01}) == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("oracle policy ordering and tie-break") {
    WhittleTable a{{0.5}, {true}, {0}}, b{{-1.0}, {true}, {0}};
    std::vector<WhittleTable> tables = {a, b};
    std::vector<StateIndex> states = {0, 0};
    RngStream rng(5);
    auto act = oracle_policy(tables, states, 1, rng);
    CHECK(act[0] == ActionFlag::Active);
    CHECK(act[1] == ActionFlag::Passive);

    std::vector<WhittleTable> eq(4, WhittleTable{{0.0}, {true}, {0}});
    std::vector<StateIndex> zeros(4, 0);
    std::vector<int> hits(4, 0);
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
      auto x = oracle_policy(eq, zeros, 2, rng);
      for (int i = 0; i < 4; ++i) hits[i] += x[i] == ActionFlag::Active;
    }
    for (int h : hits) CHECK(std::abs(h / double(n) - 0.5) < 0.02);
  }

  TEST_CASE("circulant N=5 with one arm in state 3 and the rest in state 0") {
    auto arms = build_circulant(5);
    auto tables = solve_tables(arms);
    std::vector<StateIndex> states = {3, 0, 0, 0, 0};
    RngStream rng(9);
    // state 3 carries the lowest index, so one of the state-0 arms is chosen
    auto act = oracle_policy(tables, states, 1, rng);
    CHECK(act[0] == ActionFlag::Passive);
  }

  TEST_CASE("parallel table solve matches the serial reference") {
    EnvSpec spec;
    spec.name = "maternal_health";
    spec.n_arms = 30;
    spec.budget_m = 3;
    spec.normalize();
    auto arms = build_arms(spec);
    auto par = solve_tables(arms);
    auto ser = solve_tables_serial(arms);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i].indices == ser[i].indices);
  }
}
