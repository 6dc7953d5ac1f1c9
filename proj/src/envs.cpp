#include "rmab/envs.hpp"

#include <algorithm>
#include <cmath>

#include "rmab/errors.hpp"

namespace rmab {
namespace {

using Rows = std::vector<std::vector<double>>;

RewardTable state_rewards(const std::vector<double>& by_state) {
  RewardTable r;
  for (double v : by_state) r.push_back({v, v});
  return r;
}

// Passive: stay w.p. p_stay, advance one state otherwise; the last state absorbs.
// Active: state 0 stays; elsewhere reset to 0 w.p. 0.9, stay w.p. 0.1.
ArmModel process_update_arm(double p_stay, const std::string& label) {
  constexpr std::size_t n = 5;
  Rows passive(n, std::vector<double>(n, 0.0));
  Rows active(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s + 1 < n; ++s) {
    passive[s][s] = p_stay;
    passive[s][s + 1] = 1.0 - p_stay;
  }
  passive[n - 1][n - 1] = 1.0;
  active[0][0] = 1.0;
  for (std::size_t s = 1; s < n; ++s) {
    active[s][0] = 0.9;
    active[s][s] = 0.1;
  }
  return ArmModel(validate_kernel(passive), validate_kernel(active),
                  state_rewards({0.0, -1.0, -2.0, -3.0, -4.0}), label);
}

double process_update_stay(const std::string& label) {
  if (label == "A") return 0.6;
  if (label == "B") return 0.9;
  if (label == "C") return 0.5;
  throw UnknownCategory(label);
}

ArmModel maternal_arm(const std::string& label) {
  Rows p0, p1;
  if (label == "A") {
    p0 = {{0.8, 0.2, 0.0}, {0.8, 0.2, 0.0}, {0.0, 0.2, 0.8}};
    p1 = {{0.4, 0.3, 0.3}, {0.0, 0.2, 0.8}, {0.0, 0.2, 0.8}};
  } else if (label == "B") {
    p0 = {{0.6, 0.4, 0.0}, {0.6, 0.2, 0.2}, {0.2, 0.2, 0.6}};
    p1 = {{0.6, 0.2, 0.2}, {0.2, 0.4, 0.4}, {0.1, 0.1, 0.8}};
  } else if (label == "C") {
    p0 = {{0.6, 0.2, 0.2}, {0.6, 0.2, 0.2}, {0.3, 0.3, 0.4}};
    p1 = {{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}, {0.2, 0.2, 0.6}};
  } else {
    throw UnknownCategory(label);
  }
  return ArmModel(validate_kernel(p0), validate_kernel(p1), state_rewards({0.0, 1.0, 2.0}),
                  label);
}

template <typename MakeArm>
std::vector<ArmModel> from_mix(const CategoryMix& mix, MakeArm make) {
  std::vector<ArmModel> arms;
  for (const auto& [label, count] : mix) {
    const ArmModel arm = make(label);
    arms.insert(arms.end(), count, arm);
  }
  return arms;
}

}  // namespace

CategoryMix even_split(std::size_t n, const std::vector<std::string>& labels) {
  CategoryMix mix;
  const std::size_t k = labels.size();
  for (std::size_t i = 0; i < k; ++i) mix[labels[i]] = n / k + (i == 0 ? n % k : 0);
  return mix;
}

std::vector<ArmModel> build_circulant(std::size_t n) {
  const auto passive = validate_kernel({{0.5, 0.0, 0.0, 0.5},
                                        {0.5, 0.5, 0.0, 0.0},
                                        {0.0, 0.5, 0.5, 0.0},
                                        {0.0, 0.0, 0.5, 0.5}});
  const ArmModel arm(passive, passive.transposed(), state_rewards({-1.0, 0.0, 0.0, 1.0}), "A");
  return std::vector<ArmModel>(n, arm);
}

std::vector<ArmModel> build_restart(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("restart alpha must lie in (0, 1)");
  const auto passive = validate_kernel({{0.1, 0.9, 0.0, 0.0, 0.0},
                                        {0.1, 0.0, 0.9, 0.0, 0.0},
                                        {0.1, 0.0, 0.0, 0.9, 0.0},
                                        {0.1, 0.0, 0.0, 0.0, 0.9},
                                        {0.1, 0.0, 0.0, 0.0, 0.9}});
  const auto active = validate_kernel(Rows(5, {1.0, 0.0, 0.0, 0.0, 0.0}));
  RewardTable rewards;
  for (int s = 0; s < 5; ++s) rewards.push_back({std::pow(alpha, s), 0.0});
  return std::vector<ArmModel>(n, ArmModel(passive, active, rewards, "A"));
}

std::vector<ArmModel> build_process_update(const CategoryMix& mix) {
  return from_mix(mix, [](const std::string& label) {
    return process_update_arm(process_update_stay(label), label);
  });
}

std::vector<ArmModel> build_mentoring(std::size_t n) {
  constexpr std::size_t k = 10;
  Rows p1(k, std::vector<double>(k, 0.0));
  Rows p0(k, std::vector<double>(k, 0.0));
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t down = s == 0 ? 0 : s - 1;
    const std::size_t up = s + 1 == k ? s : s + 1;
    p1[s][down] += 0.3;
    p1[s][up] += 0.7;
    p0[s][down] += 0.7;
    p0[s][up] += 0.3;
  }
  std::vector<double> reward(k);
  for (std::size_t s = 0; s < k; ++s) reward[s] = std::sqrt(static_cast<double>(s) / 10.0);
  return std::vector<ArmModel>(
      n, ArmModel(validate_kernel(p0), validate_kernel(p1), state_rewards(reward), "A"));
}

std::vector<ArmModel> build_maternal_health(const CategoryMix& mix) {
  return from_mix(mix, maternal_arm);
}

std::vector<ArmModel> apply_dynamic_switch(const std::vector<ArmModel>& arms) {
  const ArmModel* first_a = nullptr;
  const ArmModel* first_b = nullptr;
  for (const auto& arm : arms) {
    if (arm.category() == "A" && !first_a) first_a = &arm;
    if (arm.category() == "B" && !first_b) first_b = &arm;
  }
  // Fall back to the template when one side is absent from the ensemble.
  const ArmModel a = first_a ? *first_a : process_update_arm(0.6, "A");
  const ArmModel b = first_b ? *first_b : process_update_arm(0.9, "B");
  std::vector<ArmModel> out;
  out.reserve(arms.size());
  for (const auto& arm : arms) {
    if (arm.category() == "A")
      out.emplace_back(b.passive(), b.active(), b.rewards(), "A");
    else if (arm.category() == "B")
      out.emplace_back(a.passive(), a.active(), a.rewards(), "B");
    else
      out.push_back(arm);
  }
  return out;
}

const std::vector<std::string>& known_env_names() {
  static const std::vector<std::string> names = {
      "circulant", "restart", "process_update", "mentoring", "maternal_health", "sensing"};
  return names;
}

bool is_matrix_env(const std::string& name) {
  return name != "sensing" && std::find(known_env_names().begin(), known_env_names().end(),
                                        name) != known_env_names().end();
}

void EnvSpec::normalize() {
  if (std::find(known_env_names().begin(), known_env_names().end(), name) ==
      known_env_names().end())
    throw ConfigError("unknown environment '" + name + "'");
  if (n_arms < 1) throw ConfigError("n_arms must be positive");
  if (category_mix.empty()) {
    if (name == "process_update" || name == "maternal_health" || name == "sensing")
      category_mix = even_split(n_arms, {"A", "B", "C"});
    else
      category_mix = {{"A", n_arms}};
  }
  std::size_t total = 0;
  for (const auto& [label, count] : category_mix) total += count;
  if (total != n_arms) throw ConfigError("category_mix counts must sum to n_arms");
  if (budget_m < 1 || budget_m > n_arms) throw ConfigError("budget_m must lie in [1, n_arms]");
  if (dynamic_switch_step && name != "process_update")
    throw ConfigError("dynamic_switch_step is only valid for process_update");
}

std::vector<ArmModel> build_arms(const EnvSpec& spec) {
  if (spec.name == "circulant") return build_circulant(spec.n_arms);
  if (spec.name == "restart") return build_restart(spec.n_arms, spec.restart_alpha);
  if (spec.name == "process_update") return build_process_update(spec.category_mix);
  if (spec.name == "mentoring") return build_mentoring(spec.n_arms);
  if (spec.name == "maternal_health") return build_maternal_health(spec.category_mix);
  throw ConfigError("'" + spec.name + "' has no transition matrices");
}

nlohmann::json env_spec_to_json(const EnvSpec& spec) {
  nlohmann::json j = {{"name", spec.name},
                      {"n_arms", spec.n_arms},
                      {"budget_m", spec.budget_m},
                      {"category_mix", spec.category_mix}};
  if (spec.name == "restart") j["alpha"] = spec.restart_alpha;
  if (spec.dynamic_switch_step) j["dynamic_switch_step"] = *spec.dynamic_switch_step;
  return j;
}

EnvSpec env_spec_from_json(const nlohmann::json& j) {
  EnvSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.n_arms = j.at("n_arms").get<std::size_t>();
  spec.budget_m = j.at("budget_m").get<std::size_t>();
  if (j.contains("category_mix")) spec.category_mix = j["category_mix"].get<CategoryMix>();
  if (j.contains("dynamic_switch_step"))
    spec.dynamic_switch_step = j["dynamic_switch_step"].get<std::size_t>();
  spec.restart_alpha = j.value("alpha", 0.9);
  spec.normalize();
  return spec;
}

}  // namespace rmab
