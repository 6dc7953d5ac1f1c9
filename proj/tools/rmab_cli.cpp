#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmab/environment.hpp"
#include "rmab/envs.hpp"
#include "rmab/errors.hpp"
#include "rmab/harness.hpp"
#include "rmab/policies.hpp"
#include "rmab/whittle.hpp"

using namespace rmab;

namespace {

EnvSpec default_spec(const std::string& name, std::size_t n, std::size_t m) {
  EnvSpec spec;
  spec.name = name;
  spec.n_arms = n;
  spec.budget_m = m;
  spec.normalize();
  return spec;
}

int cmd_run(const std::string& config_path, const std::string& out_override, bool serial) {
  auto cfg = load_experiment_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  std::fprintf(stderr, "running %zu policies x %zu runs, T=%lld on %s\n", cfg.policies.size(),
               cfg.runs, static_cast<long long>(cfg.horizon), cfg.env.name.c_str());
  const auto result = serial ? run_experiment_serial(cfg) : run_experiment(cfg);
  write_outputs(result, cfg, cfg.output_dir);
  for (const auto& agg : result.aggregates)
    std::printf("%-16s final mean_cum_avg_reward %.6f (std %.6f)\n", agg.policy.c_str(),
                agg.mean.back(), agg.std.back());
  std::printf("outputs in %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_whittle(const std::string& env_name, const std::string& out, std::size_t n,
                std::size_t m) {
  if (!is_matrix_env(env_name))
    throw ConfigError("'" + env_name + "' has no transition matrices to index");
  const auto arms = build_arms(default_spec(env_name, n, m));
  const auto tables = solve_tables(arms);

  // one entry per distinct model
  nlohmann::json models = nlohmann::json::array();
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    std::size_t k = 0;
    while (k < owner.size() && !(arms[owner[k]] == arms[i])) ++k;
    if (k == owner.size()) {
      owner.push_back(i);
      nlohmann::json entry = arm_to_json(arms[i]);
      entry["indices"] = tables[i].indices;
      std::vector<bool> conv = tables[i].converged;
      entry["converged"] = conv;
      entry["arms"] = nlohmann::json::array();
      models.push_back(entry);
    }
    models[k]["arms"].push_back(i);
  }
  const nlohmann::json doc = {{"env", env_name}, {"n_arms", arms.size()}, {"models", models}};
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write '" + out + "'");
  f << doc.dump(2) << "\n";
  for (const auto& entry : models) {
    std::printf("category %s:", entry["category"].get<std::string>().c_str());
    for (double x : entry["indices"]) std::printf(" %.6f", x);
    std::printf("\n");
  }
  return 0;
}

int cmd_resources(std::size_t n, std::size_t m, std::size_t samples, const std::string& out) {
  const auto spec = default_spec("circulant", n, m);
  nlohmann::json doc = nlohmann::json::object();
  std::printf("%-14s %14s %12s %14s\n", "policy", "stored_values", "bytes", "ms/decision");
  const PolicyKind kinds[] = {PolicyKind::WiqlUcb,    PolicyKind::WiqlBiswas, PolicyKind::WiqlAb,
                              PolicyKind::WiqlFu,     PolicyKind::JointQ,     PolicyKind::Oracle,
                              PolicyKind::Greedy,     PolicyKind::RoundRobin, PolicyKind::AoiGreedy};
  for (auto kind : kinds) {
    PolicyConfig pc;
    pc.kind = kind;
    MatrixEnvironment env(build_arms(spec), m, 1);
    EnvContext ctx{env.state_sizes(), m, env.models()};
    try {
      auto policy = make_policy(pc, ctx);
      auto row = count_stored_values(to_string(kind), *policy);
      row.ms_per_decision = measure_runtime_per_decision(*policy, env, samples / 10, samples);
      std::printf("%-14s %14zu %12zu %14.5f\n", row.policy.c_str(), row.stored_values, row.bytes,
                  row.ms_per_decision);
      doc[row.policy] = {{"stored_values", row.stored_values},
                         {"bytes", row.bytes},
                         {"ms_per_decision", row.ms_per_decision}};
    } catch (const CapacityExceeded& e) {
      std::printf("%-14s %s\n", to_string(kind).c_str(), e.what());
      doc[to_string(kind)] = {{"error", e.what()},
                              {"required_entries",
                               JointQPolicy::required_entries(ctx.state_sizes, m)}};
    }
  }
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write '" + out + "'");
    f << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_list_envs() {
  for (const auto& name : known_env_names()) std::printf("%s\n", name.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restless bandit scheduling experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment campaign from a JSON config");
  std::string config_path, run_out;
  bool serial = false;
  run->add_option("--config", config_path, "ExperimentConfig JSON (or a manifest.json)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "output directory (overrides the config)");
  run->add_flag("--serial", serial, "run cells one after another");

  auto* whittle = app.add_subcommand("whittle", "exact Whittle indices for a benchmark");
  std::string env_name, whittle_out;
  std::size_t wn = 5, wm = 1;
  const auto add_whittle_opts = [&](CLI::App* cmd) {
    cmd->add_option("--env", env_name, "environment name")->required();
    cmd->add_option("--out", whittle_out, "output JSON")->required();
    cmd->add_option("--n", wn, "number of arms");
    cmd->add_option("--m", wm, "budget");
  };
  add_whittle_opts(whittle);
  auto* solve = whittle->add_subcommand("solve", "same as whittle");
  add_whittle_opts(solve);
  whittle->require_subcommand(0, 1);
  // options may be given on either level
  whittle->get_option("--env")->required(false);
  whittle->get_option("--out")->required(false);

  auto* resources = app.add_subcommand("resources", "memory and runtime per policy");
  std::size_t rn = 15, rm = 3, samples = 10000;
  std::string res_out;
  resources->add_option("--n", rn, "number of arms");
  resources->add_option("--m", rm, "budget");
  resources->add_option("--samples", samples, "timed decisions per policy");
  resources->add_option("--out", res_out, "optional JSON output");

  auto* list = app.add_subcommand("list-envs", "print the available environments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, run_out, serial);
    if (*whittle) {
      if (env_name.empty() || whittle_out.empty()) {
        std::cerr << "whittle: --env and --out are required\n";
        return 2;
      }
      return cmd_whittle(env_name, whittle_out, wn, wm);
    }
    if (*resources) return cmd_resources(rn, rm, samples, res_out);
    if (*list) return cmd_list_envs();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
