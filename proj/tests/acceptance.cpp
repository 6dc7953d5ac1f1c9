// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   only criterion N (exit code 1 on FAIL)

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "rmab/envs.hpp"
#include "rmab/errors.hpp"
#include "rmab/harness.hpp"
#include "rmab/policies.hpp"
#include "rmab/selection.hpp"
#include "rmab/whittle.hpp"

using namespace rmab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

PolicyConfig policy(PolicyKind kind) {
  PolicyConfig pc;
  pc.kind = kind;
  return pc;
}

ExperimentConfig campaign(const std::string& env, std::size_t n, std::size_t m,
                          std::vector<PolicyKind> kinds, std::int64_t horizon = 100000,
                          std::size_t runs = 10) {
  ExperimentConfig cfg;
  cfg.env.name = env;
  cfg.env.n_arms = n;
  cfg.env.budget_m = m;
  cfg.horizon = horizon;
  cfg.runs = runs;
  cfg.seed_base = 2024;
  for (auto k : kinds) cfg.policies.push_back(policy(k));
  return cfg;
}

double final_mean(const ExperimentResult& res, const std::string& label) {
  for (const auto& agg : res.aggregates)
    if (agg.policy == label) return agg.mean.back();
  throw ConfigError("no policy " + label);
}

double mean_from(const ExperimentResult& res, const std::string& label, std::int64_t first) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& rec : res.records)
    if (rec.policy == label) {
      s += rec.mean_reward_from(first);
      ++n;
    }
  return s / static_cast<double>(n);
}

// --------------------------------------------------------------------------

Verdict circulant_indices() {
  const auto t0 = Clock::now();
  const auto table = solve_whittle_table(build_circulant(1).front());
  const double secs = seconds_since(t0);
  const double expected[] = {-1.0, -0.5, 0.5, 1.0};
  double worst = 0.0;
  for (std::size_t s = 0; s < 4; ++s) worst = std::max(worst, std::abs(table.indices[s] - expected[s]));
  Verdict v;
  v.pass = worst <= 1e-3 && secs < 1.0;
  v.detail = fmt("solved (%.4f, %.4f, %.4f, %.4f), expected (-1, -0.5, 0.5, 1), max err %.4f, %.3f s",
                 table.indices[0], table.indices[1], table.indices[2], table.indices[3], worst, secs);
  return v;
}

Verdict top_m_equivalence() {
  const auto t0 = Clock::now();
  RngStream rng(7);
  int matches = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(8);
    const std::size_t m = 1 + rng.uniform_index(std::min<std::size_t>(3, n));
    const std::size_t states = 2 + rng.uniform_index(4);
    // per-arm Q(s, a) and a current state per arm
    std::vector<std::vector<std::array<double, 2>>> q(n, std::vector<std::array<double, 2>>(states));
    std::vector<StateIndex> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& row : q[i]) row = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
      s[i] = rng.uniform_index(states);
    }
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = q[i][s[i]][1] - q[i][s[i]][0];
    const auto chosen = top_m_actions(delta, m, rng);

    const auto objective = [&](unsigned mask) {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += q[i][s[i]][(mask >> i) & 1u];
      return v;
    };
    double best = -1e300;
    unsigned best_mask = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
      const double v = objective(mask);
      if (v > best) {
        best = v;
        best_mask = mask;
      }
    }
    unsigned got = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (chosen[i] == ActionFlag::Active) got |= 1u << i;
    if (got == best_mask && objective(got) == best) ++matches;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = matches == trials && secs < 10.0;
  v.detail = fmt("%d/%d subsets match the exhaustive optimum, %.2f s", matches, trials, secs);
  return v;
}

Verdict fu_circulant_plateau() {
  auto cfg = campaign("circulant", 5, 1, {PolicyKind::WiqlFu});
  cfg.normalize();
  const auto res = run_experiment(cfg);
  const double fu = final_mean(res, "wiql_fu");
  Verdict v;
  v.pass = std::abs(fu - 0.08) <= 0.05;
  v.detail = fmt("wiql_fu final cumulative average %.4f (target 0.08 +- 0.05; std over runs %.4f)", fu,
                 res.aggregates[0].std.back());
  return v;
}

Verdict ucb_near_oracle() {
  auto cfg = campaign("circulant", 5, 1, {PolicyKind::WiqlUcb, PolicyKind::Oracle});
  cfg.normalize();
  const auto res = run_experiment(cfg);
  const double ucb = final_mean(res, "wiql_ucb");
  const double oracle = final_mean(res, "oracle");
  const double rel = std::abs(ucb - oracle) / std::abs(oracle);
  Verdict v;
  v.pass = rel <= 0.10;
  v.detail = fmt("wiql_ucb %.4f vs oracle %.4f, gap %.1f%% (limit 10%%)", ucb, oracle, 100.0 * rel);
  return v;
}

Verdict scaling_separation() {
  auto cfg = campaign("circulant", 100, 10,
                      {PolicyKind::WiqlUcb, PolicyKind::WiqlBiswas, PolicyKind::WiqlAb,
                       PolicyKind::WiqlFu});
  cfg.normalize();
  const auto res = run_experiment(cfg);
  const double ucb = final_mean(res, "wiql_ucb");
  const double bis = final_mean(res, "wiql_biswas");
  const double ab = final_mean(res, "wiql_ab");
  const double fu = final_mean(res, "wiql_fu");
  Verdict v;
  v.pass = ucb > bis && ucb > ab && ucb > fu;
  v.detail = fmt("ucb %.4f, biswas %.4f, ab %.4f, fu %.4f", ucb, bis, ab, fu);
  return v;
}

Verdict restart_exploration() {
  auto cfg = campaign("restart", 100, 10,
                      {PolicyKind::WiqlUcb, PolicyKind::WiqlBiswas, PolicyKind::Oracle});
  cfg.normalize();
  const auto res = run_experiment(cfg);
  const double ucb = final_mean(res, "wiql_ucb");
  const double bis = final_mean(res, "wiql_biswas");
  const double oracle = final_mean(res, "oracle");
  const double rel = std::abs(ucb - oracle) / std::abs(oracle);
  Verdict v;
  v.pass = ucb > bis && rel <= 0.15;
  v.detail = fmt("ucb %.4f, biswas %.4f, oracle %.4f, ucb gap to oracle %.1f%% (limit 15%%)", ucb,
                 bis, oracle, 100.0 * rel);
  return v;
}

Verdict dynamic_adaptation() {
  auto cfg = campaign("process_update", 120, 10,
                      {PolicyKind::WiqlUcb, PolicyKind::WiqlFu, PolicyKind::WiqlAb,
                       PolicyKind::Oracle});
  cfg.dynamic = true;
  cfg.normalize();
  const auto res = run_experiment(cfg);
  const auto first = static_cast<std::int64_t>(*cfg.env.dynamic_switch_step);
  const double ucb = mean_from(res, "wiql_ucb", first);
  const double fu = mean_from(res, "wiql_fu", first);
  const double ab = mean_from(res, "wiql_ab", first);
  const double oracle = mean_from(res, "oracle", first);
  Verdict v;
  v.pass = ucb > fu && ucb > ab;
  v.detail = fmt("post-switch mean reward from step %lld: ucb %.4f, fu %.4f, ab %.4f (oracle %.4f)",
                 static_cast<long long>(first), ucb, fu, ab, oracle);
  return v;
}

Verdict poll_distribution() {
  auto cfg = campaign("sensing", 30, 3,
                      {PolicyKind::WiqlUcb, PolicyKind::RoundRobin, PolicyKind::AoiGreedy}, 20000);
  cfg.env.category_mix = {{"A", 10}, {"B", 10}, {"C", 10}};
  cfg.normalize();
  const auto res = run_experiment(cfg);
  std::map<std::string, std::map<std::string, double>> share;
  for (const auto& rec : res.records) {
    double total = 0.0;
    for (auto c : rec.polls) total += static_cast<double>(c);
    for (std::size_t i = 0; i < rec.polls.size(); ++i)
      share[rec.policy][rec.categories[i]] +=
          static_cast<double>(rec.polls[i]) / total / static_cast<double>(cfg.runs);
  }
  const auto& u = share["wiql_ucb"];
  bool ok = u.at("C") > u.at("B") && u.at("B") > u.at("A");
  double worst = 0.0;
  for (const char* p : {"round_robin", "aoi"})
    for (const auto& [cat, sh] : share[p]) worst = std::max(worst, std::abs(sh - 1.0 / 3.0) * 3.0);
  ok = ok && worst <= 0.05;
  Verdict v;
  v.pass = ok;
  v.detail = fmt("ucb shares A %.3f B %.3f C %.3f; rr/aoi worst relative deviation from 1/3 %.1f%% "
                 "(aoi A %.3f B %.3f C %.3f)",
                 u.at("A"), u.at("B"), u.at("C"), 100.0 * worst, share["aoi"]["A"],
                 share["aoi"]["B"], share["aoi"]["C"]);
  return v;
}

Verdict single_arm_q_convergence() {
  const auto arm = build_circulant(1).front();
  PerArmQLearner learner({4});
  RngStream rng(99);
  StateIndex s = 0;
  for (int k = 0; k < 1000000; ++k) {
    const auto a = rng.bernoulli(0.5) ? ActionFlag::Active : ActionFlag::Passive;
    const auto nx = sample_next_state(arm, s, a, rng);
    learner.update(0, s, a, reward_of(arm, s, a), nx);
    s = nx;
  }
  // both sides measured relative to max_a Q(0, a)
  const auto vf = solve_penalized_mdp(arm, 0.0);
  const double exact_ref = std::max(penalized_q(arm, vf, 0, ActionFlag::Passive),
                                    penalized_q(arm, vf, 0, ActionFlag::Active));
  const double learned_ref =
      std::max(learner.q(0, 0, ActionFlag::Passive), learner.q(0, 0, ActionFlag::Active));
  double worst = 0.0;
  for (StateIndex x = 0; x < 4; ++x)
    for (auto a : {ActionFlag::Passive, ActionFlag::Active})
      worst = std::max(worst, std::abs((learner.q(0, x, a) - learned_ref) -
                                       (penalized_q(arm, vf, x, a) - exact_ref)));
  Verdict v;
  v.pass = worst <= 0.05;
  v.detail = fmt("max |learned - fixed point| after 1e6 updates %.4f (limit 0.05)", worst);
  return v;
}

Verdict resource_accounting() {
  const auto sizes = [](std::size_t n) { return std::vector<std::size_t>(n, 4); };
  const WiqlUcbPolicy u15(sizes(15), 3), u30(sizes(30), 3);
  const auto c15 = count_stored_values("wiql_ucb", u15).stored_values;
  const auto c30 = count_stored_values("wiql_ucb", u30).stored_values;
  bool capacity = false;
  PolicyConfig jq;
  jq.kind = PolicyKind::JointQ;
  try {
    JointQPolicy joint(sizes(15), 3, jq);
  } catch (const CapacityExceeded&) {
    capacity = true;
  }
  EnvSpec spec;
  spec.name = "circulant";
  spec.n_arms = 15;
  spec.budget_m = 3;
  spec.normalize();
  MatrixEnvironment env(build_arms(spec), 3, 5);
  WiqlUcbPolicy timed(env.state_sizes(), 3);
  const double ms = measure_runtime_per_decision(timed, env, 1000, 20000);
  Verdict v;
  v.pass = c30 == 2 * c15 && capacity && ms < 1.0;
  v.detail = fmt("ucb values N=15 %zu (%zu B), N=30 %zu; joint_q capacity error %s; ucb %.4f ms/decision",
                 c15, c15 * 8, c30, capacity ? "raised" : "NOT raised", ms);
  return v;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict manifest_determinism() {
  const std::filesystem::path root = std::filesystem::temp_directory_path() / "rmab_acceptance_manifest";
  std::filesystem::remove_all(root);
  std::vector<ExperimentConfig> cfgs;
  {
    auto c = campaign("circulant", 10, 2,
                      {PolicyKind::WiqlUcb, PolicyKind::WiqlBiswas, PolicyKind::WiqlAb,
                       PolicyKind::WiqlFu, PolicyKind::Oracle},
                      5000, 3);
    cfgs.push_back(c);
  }
  {
    auto c = campaign("process_update", 12, 2,
                      {PolicyKind::WiqlUcb, PolicyKind::Greedy, PolicyKind::Oracle}, 4000, 3);
    c.dynamic = true;
    cfgs.push_back(c);
  }
  {
    auto c = campaign("sensing", 9, 2, {PolicyKind::WiqlUcb, PolicyKind::AoiGreedy}, 3000, 2);
    cfgs.push_back(c);
  }
  {
    auto c = campaign("maternal_health", 30, 3, {PolicyKind::WiqlUcb, PolicyKind::Oracle}, 160, 4);
    cfgs.push_back(c);
  }
  int same = 0;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    auto cfg = cfgs[k];
    cfg.normalize();
    const auto a = root / ("a" + std::to_string(k));
    const auto b = root / ("b" + std::to_string(k));
    write_outputs(run_experiment(cfg), cfg, a.string());
    auto again = load_experiment_config((a / "manifest.json").string());
    write_outputs(run_experiment_serial(again), again, b.string());
    const auto ra = read_file(a / "rewards.csv");
    if (!ra.empty() && ra == read_file(b / "rewards.csv")) ++same;
  }
  std::filesystem::remove_all(root);
  Verdict v;
  v.pass = same == static_cast<int>(cfgs.size());
  v.detail = fmt("%d/%zu manifests reproduce rewards.csv byte-identically", same, cfgs.size());
  return v;
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"circulant Whittle indices", circulant_indices},
      {"top-M equivalence with exhaustive subsets", top_m_equivalence},
      {"WIQL-Fu circulant plateau", fu_circulant_plateau},
      {"WIQL-UCB near oracle on circulant", ucb_near_oracle},
      {"scaling separation on circulant N=100", scaling_separation},
      {"restart exploration", restart_exploration},
      {"dynamic adaptation on process update", dynamic_adaptation},
      {"poll distribution on the sensing env", poll_distribution},
      {"single-arm Q convergence", single_arm_q_convergence},
      {"resource accounting", resource_accounting},
      {"manifest determinism", manifest_determinism},
  };
  std::vector<std::size_t> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const long k = std::strtol(argv[++i], nullptr, 10);
      if (k < 1 || k > static_cast<long>(criteria.size())) {
        std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
        return 2;
      }
      which.push_back(static_cast<std::size_t>(k));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (which.empty())
    for (std::size_t k = 1; k <= criteria.size(); ++k) which.push_back(k);

  int failed = 0;
  for (auto k : which) {
    const auto& c = criteria[k - 1];
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    std::printf("[%s] criterion %zu: %s | %s | %.1f s\n", v.pass ? "PASS" : "FAIL", k, c.name,
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
