#include "rmab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>

#include "rmab/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rmab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::int64_t default_horizon(const std::string& env_name) {
  if (env_name == "maternal_health") return 160;
  if (env_name == "sensing") return 20000;
  return 100000;
}

void ExperimentConfig::normalize() {
  env.normalize();
  if (horizon == 0) horizon = default_horizon(env.name);
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (policies.empty()) throw ConfigError("at least one policy is required");
  for (const auto& p : policies) p.validate();
  for (std::size_t i = 0; i < policies.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (policies[i].display_name() == policies[k].display_name())
        throw ConfigError("duplicate policy label '" + policies[i].display_name() + "'");
  if (dynamic && !env.dynamic_switch_step)
    env.dynamic_switch_step = static_cast<std::size_t>(horizon / 2);
  if (env.dynamic_switch_step) env.normalize();
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["env"] = env_spec_to_json(cfg.env);
  if (cfg.env.name == "sensing") j["sensing"] = sensing::sensing_params_to_json(cfg.sensing);
  j["policies"] = nlohmann::json::array();
  for (const auto& p : cfg.policies) j["policies"].push_back(policy_config_to_json(p));
  j["horizon"] = cfg.horizon;
  j["runs"] = cfg.runs;
  j["seed_base"] = cfg.seed_base;
  j["smoothing_window"] = cfg.smoothing_window;
  j["output_dir"] = cfg.output_dir;
  j["dynamic"] = cfg.dynamic;
  j["workers"] = cfg.workers;
  return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.env = env_spec_from_json(j.at("env"));
    if (j.contains("sensing")) cfg.sensing = sensing::sensing_params_from_json(j["sensing"]);
    for (const auto& p : j.at("policies")) cfg.policies.push_back(policy_config_from_json(p));
    cfg.horizon = j.value("horizon", std::int64_t{0});
    cfg.runs = j.value("runs", cfg.runs);
    cfg.seed_base = j.value("seed_base", cfg.seed_base);
    cfg.smoothing_window = j.value("smoothing_window", cfg.smoothing_window);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.dynamic = j.value("dynamic", false);
    cfg.workers = j.value("workers", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  cfg.normalize();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  auto cfg = experiment_config_from_json(j);
  if (const char* dir = std::getenv("RMAB_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
  if (const char* w = std::getenv("RMAB_WORKERS"); w && *w) cfg.workers = std::atoi(w);
  return cfg;
}

double RunRecord::mean_reward_from(std::int64_t first) const {
  const auto n = static_cast<std::int64_t>(reward.size());
  if (first < 1 || first > n) throw ShapeError("step out of range");
  double s = 0.0;
  for (std::int64_t t = first; t <= n; ++t) s += reward[t - 1];
  return s / static_cast<double>(n - first + 1);
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.env.name == "sensing") {
    std::shared_ptr<const sensing::TraceTable> trace;
    if (!cfg.sensing.trace_csv.empty())
      trace = std::make_shared<sensing::TraceTable>(
          sensing::TraceTable::from_csv(cfg.sensing.trace_csv));
    return std::make_unique<SensingEnvironment>(cfg.env.category_mix, cfg.env.budget_m,
                                                cfg.sensing, seed, trace);
  }
  return std::make_unique<MatrixEnvironment>(build_arms(cfg.env), cfg.env.budget_m, seed);
}

RunRecord run_cell(const ExperimentConfig& cfg, std::size_t policy_index, std::size_t run,
                   bool keep_snapshot) {
  const auto& pcfg = cfg.policies.at(policy_index);
  const std::uint64_t seed = cfg.run_seed(run);
  auto env = make_environment(cfg, seed);
  EnvContext ctx{env->state_sizes(), env->budget(), env->models()};
  auto policy = make_policy(pcfg, ctx);
  RngStream rng(mix_seed(seed, policy_index + 1));

  RunRecord rec;
  rec.policy = pcfg.display_name();
  rec.policy_index = policy_index;
  rec.run = run;
  rec.seed = seed;
  rec.categories = env->categories();
  rec.polls.assign(env->num_arms(), 0);
  rec.reward.reserve(static_cast<std::size_t>(cfg.horizon));
  rec.cum_avg.reserve(static_cast<std::size_t>(cfg.horizon));

  const auto switch_at = cfg.env.dynamic_switch_step.value_or(0);
  double total = 0.0;
  double decide_ms = 0.0;
  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    if (switch_at > 0 && static_cast<std::size_t>(t) == switch_at && env->apply_dynamic_switch())
      policy->on_dynamics_change(*env->models());

    const std::vector<StateIndex> states = env->states();
    const auto start = Clock::now();
    const auto actions = policy->select({states, env->delays(), t}, rng);
    decide_ms += ms_since(start);

    const auto step = env->step(actions);
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (actions[i] == ActionFlag::Active) ++rec.polls[i];

    const auto upd = Clock::now();
    policy->update({states, actions, step.rewards, step.next_states});
    decide_ms += ms_since(upd);

    double r = 0.0;
    for (double x : step.rewards) r += x;
    total += r;
    rec.reward.push_back(r);
    rec.cum_avg.push_back(total / static_cast<double>(t));
  }
  rec.stored_values = policy->stored_values();
  rec.ms_per_decision = decide_ms / static_cast<double>(cfg.horizon);
  if (keep_snapshot) rec.snapshot = policy->snapshot();
  return rec;
}

namespace {

ExperimentResult assemble(const ExperimentConfig& cfg, std::vector<RunRecord> records) {
  ExperimentResult out;
  out.records = std::move(records);
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    std::vector<const RunRecord*> group;
    for (const auto& rec : out.records)
      if (rec.policy_index == p) group.push_back(&rec);
    out.aggregates.push_back(average_over_runs(group));
    ResourceRow row;
    row.policy = group.front()->policy;
    row.stored_values = group.front()->stored_values;
    row.bytes = row.stored_values * 8;
    for (const auto* rec : group) row.ms_per_decision += rec->ms_per_decision;
    row.ms_per_decision /= static_cast<double>(group.size());
    out.resources.push_back(row);
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment_serial(const ExperimentConfig& cfg) {
  std::vector<RunRecord> records;
  for (std::size_t p = 0; p < cfg.policies.size(); ++p)
    for (std::size_t r = 0; r < cfg.runs; ++r) records.push_back(run_cell(cfg, p, r));
  return assemble(cfg, std::move(records));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const std::size_t cells = cfg.policies.size() * cfg.runs;
  std::vector<RunRecord> records(cells);
  std::exception_ptr failure;
#ifdef _OPENMP
  const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#else
  const int threads = 1;
#endif
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t k = 0; k < cells; ++k) {
    try {
      records[k] = run_cell(cfg, k / cfg.runs, k % cfg.runs);
    } catch (...) {
#pragma omp critical(rmab_harness_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(cfg, std::move(records));
}

AggregateSeries average_over_runs(const std::vector<const RunRecord*>& records) {
  if (records.empty()) throw ShapeError("no records to average");
  AggregateSeries agg;
  agg.policy = records.front()->policy;
  const std::size_t len = records.front()->cum_avg.size();
  for (const auto* rec : records)
    if (rec->cum_avg.size() != len) throw ShapeError("records differ in length");
  const auto n = static_cast<double>(records.size());
  agg.mean.assign(len, 0.0);
  agg.std.assign(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    double s = 0.0;
    for (const auto* rec : records) s += rec->cum_avg[t];
    const double mean = s / n;
    agg.mean[t] = mean;
    if (records.size() > 1) {
      double ss = 0.0;
      for (const auto* rec : records) ss += (rec->cum_avg[t] - mean) * (rec->cum_avg[t] - mean);
      agg.std[t] = std::sqrt(ss / (n - 1.0));
    }
  }
  return agg;
}

double measure_runtime_per_decision(Policy& policy, Environment& env, std::size_t warmup,
                                    std::size_t samples, std::uint64_t seed) {
  RngStream rng(seed);
  double total = 0.0;
  for (std::size_t k = 0; k < warmup + samples; ++k) {
    const std::vector<StateIndex> states = env.states();
    const auto t = static_cast<std::int64_t>(k + 1);
    const auto start = Clock::now();
    const auto actions = policy.select({states, env.delays(), t}, rng);
    double elapsed = ms_since(start);
    const auto step = env.step(actions);
    const auto upd = Clock::now();
    policy.update({states, actions, step.rewards, step.next_states});
    elapsed += ms_since(upd);
    if (k >= warmup) total += elapsed;
  }
  return samples == 0 ? 0.0 : total / static_cast<double>(samples);
}

ResourceRow count_stored_values(const std::string& label, const Policy& policy) {
  ResourceRow row;
  row.policy = label;
  row.stored_values = policy.stored_values();
  row.bytes = row.stored_values * 8;
  return row;
}

std::string rewards_csv(const ExperimentResult& result) {
  std::string out = "step,policy,mean_cum_avg_reward,std\n";
  for (const auto& agg : result.aggregates)
    for (std::size_t t = 0; t < agg.mean.size(); ++t) {
      out += std::to_string(t + 1);
      out += ',';
      out += agg.policy;
      out += ',';
      out += fmt_double(agg.mean[t]);
      out += ',';
      out += fmt_double(agg.std[t]);
      out += '\n';
    }
  return out;
}

std::string polls_csv(const ExperimentResult& result) {
  std::string out = "policy,arm_id,category,polls\n";
  for (const auto& agg : result.aggregates) {
    std::vector<const RunRecord*> group;
    for (const auto& rec : result.records)
      if (rec.policy == agg.policy) group.push_back(&rec);
    const auto& first = *group.front();
    for (std::size_t i = 0; i < first.polls.size(); ++i) {
      double s = 0.0;
      for (const auto* rec : group) s += static_cast<double>(rec->polls[i]);
      out += agg.policy + ',' + std::to_string(i) + ',' + first.categories[i] + ',' +
             fmt_double(s / static_cast<double>(group.size())) + '\n';
    }
  }
  return out;
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  write_text(root / "rewards.csv", rewards_csv(result));
  write_text(root / "polls.csv", polls_csv(result));

  nlohmann::json res = nlohmann::json::object();
  for (const auto& row : result.resources)
    res[row.policy] = {{"stored_values", row.stored_values},
                       {"bytes", row.bytes},
                       {"ms_per_decision", row.ms_per_decision}};
  write_text(root / "resources.json", res.dump(2) + "\n");

  auto manifest = experiment_config_to_json(cfg);
  manifest["seeds"] = nlohmann::json::array();
  for (std::size_t r = 0; r < cfg.runs; ++r) manifest["seeds"].push_back(cfg.run_seed(r));
  manifest["runtime_note"] =
      "resources.json bytes assume 8 bytes per value; ms_per_decision is wall clock on this host";
  write_text(root / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace rmab
