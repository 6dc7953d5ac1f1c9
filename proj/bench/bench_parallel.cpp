// Serial reference vs OpenMP for the two parallel kernels: experiment cells
// and per-model Whittle tables.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "rmab/harness.hpp"
#include "rmab/whittle.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rmab;

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const std::int64_t horizon = argc > 1 ? std::atoll(argv[1]) : 20000;
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#endif

  ExperimentConfig cfg;
  cfg.env.name = "circulant";
  cfg.env.n_arms = 20;
  cfg.env.budget_m = 2;
  cfg.horizon = horizon;
  cfg.runs = 4;
  for (auto kind : {PolicyKind::WiqlUcb, PolicyKind::WiqlBiswas, PolicyKind::Oracle}) {
    PolicyConfig pc;
    pc.kind = kind;
    cfg.policies.push_back(pc);
  }
  cfg.normalize();

  ExperimentResult serial, parallel;
  const double ts = time_ms([&] { serial = run_experiment_serial(cfg); });
  const double tp = time_ms([&] { parallel = run_experiment(cfg); });
  const bool same = rewards_csv(serial) == rewards_csv(parallel);
  std::printf("experiment cells  serial %9.1f ms  parallel %9.1f ms  speedup %.2f  identical %s\n",
              ts, tp, ts / tp, same ? "yes" : "NO");

  EnvSpec mh;
  mh.name = "maternal_health";
  mh.n_arms = 3000;
  mh.budget_m = 100;
  mh.normalize();
  const auto arms = build_arms(mh);
  std::vector<WhittleTable> a, b;
  const double ws = time_ms([&] { a = solve_tables_serial(arms); });
  const double wp = time_ms([&] { b = solve_tables(arms); });
  bool eq = a.size() == b.size();
  for (std::size_t i = 0; eq && i < a.size(); ++i) eq = a[i].indices == b[i].indices;
  std::printf("whittle tables    serial %9.1f ms  parallel %9.1f ms  speedup %.2f  identical %s\n",
              ws, wp, ws / wp, eq ? "yes" : "NO");
  return same && eq ? 0 : 1;
}
