#pragma once

// Seeded experiment campaigns: one fresh environment per (policy, run) cell,
// common random numbers across policies, deterministic merge of results.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmab/environment.hpp"
#include "rmab/envs.hpp"
#include "rmab/policies.hpp"
#include "rmab/sensing.hpp"

namespace rmab {

struct ExperimentConfig {
  EnvSpec env;
  sensing::SensingParams sensing;
  std::vector<PolicyConfig> policies;
  std::int64_t horizon = 0;  // 0 picks the environment default
  std::size_t runs = 10;
  std::uint64_t seed_base = 0;
  std::size_t smoothing_window = 100;
  std::string output_dir = "results";
  bool dynamic = false;  // switch at floor(T/2)
  int workers = 0;       // 0 = OpenMP default

  /// Resolves defaults (horizon, switch step) and checks invariants.
  void normalize();
  std::uint64_t run_seed(std::size_t r) const { return seed_base + r; }
};

std::int64_t default_horizon(const std::string& env_name);

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
/// Reads a config file and applies RMAB_OUTPUT_DIR / RMAB_WORKERS.
ExperimentConfig load_experiment_config(const std::string& path);

struct RunRecord {
  std::string policy;
  std::size_t policy_index = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<double> reward;   // per-step sum over arms
  std::vector<double> cum_avg;  // running mean of reward
  std::vector<std::uint64_t> polls;
  std::vector<std::string> categories;
  std::size_t stored_values = 0;
  double ms_per_decision = 0.0;
  nlohmann::json snapshot;

  /// Mean reward over steps first..T (1-based, inclusive).
  double mean_reward_from(std::int64_t first) const;
};

struct AggregateSeries {
  std::string policy;
  std::vector<double> mean;
  std::vector<double> std;  // sample std; 0 when there is one run
};

struct ResourceRow {
  std::string policy;
  std::size_t stored_values = 0;
  std::size_t bytes = 0;
  double ms_per_decision = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // ordered by (policy, run)
  std::vector<AggregateSeries> aggregates;
  std::vector<ResourceRow> resources;
};

std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg, std::uint64_t seed);

/// One cell: policy p on a fresh environment seeded for run r.
RunRecord run_cell(const ExperimentConfig& cfg, std::size_t policy_index, std::size_t run,
                   bool keep_snapshot = false);

/// Cells in parallel; output identical to run_experiment_serial.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment_serial(const ExperimentConfig& cfg);

AggregateSeries average_over_runs(const std::vector<const RunRecord*>& records);

/// Mean wall-clock ms over `samples` select+update cycles after `warmup` cycles.
double measure_runtime_per_decision(Policy& policy, Environment& env, std::size_t warmup,
                                    std::size_t samples, std::uint64_t seed = 0);

ResourceRow count_stored_values(const std::string& label, const Policy& policy);

/// rewards.csv, polls.csv, resources.json, manifest.json.
void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::string& dir);
std::string rewards_csv(const ExperimentResult& result);
std::string polls_csv(const ExperimentResult& result);

}  // namespace rmab
