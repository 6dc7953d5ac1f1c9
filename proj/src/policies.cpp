#include "rmab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmab/errors.hpp"
#include "rmab/selection.hpp"

namespace rmab {

namespace {

std::size_t shared_state_size(const std::vector<std::size_t>& sizes, const char* who) {
  if (sizes.empty()) throw ShapeError(std::string(who) + " needs at least one arm");
  for (std::size_t n : sizes)
    if (n != sizes.front())
      throw DimensionMismatch(std::string(who) +
                              " shares one table across arms and needs equal state counts");
  return sizes.front();
}

void check_budget(std::size_t n, std::size_t m) {
  if (m < 1 || m > n) throw ShapeError("budget must lie in [1, N]");
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::WiqlUcb: return "wiql_ucb";
    case PolicyKind::WiqlBiswas: return "wiql_biswas";
    case PolicyKind::WiqlAb: return "wiql_ab";
    case PolicyKind::WiqlFu: return "wiql_fu";
    case PolicyKind::JointQ: return "joint_q";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::RoundRobin: return "round_robin";
    case PolicyKind::AoiGreedy: return "aoi";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  for (auto k : {PolicyKind::Oracle, PolicyKind::WiqlUcb, PolicyKind::WiqlBiswas,
                 PolicyKind::WiqlAb, PolicyKind::WiqlFu, PolicyKind::JointQ, PolicyKind::Greedy,
                 PolicyKind::RoundRobin, PolicyKind::AoiGreedy})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown policy kind '" + s + "'");
}

void PolicyConfig::validate() const {
  const auto rate_ok = [](double r) { return r > 0.0 && r <= 1.0; };
  if (epsilon0 && !(*epsilon0 >= 0.0 && *epsilon0 <= 1.0))
    throw ConfigError("epsilon0 must lie in [0, 1]");
  if (!(eps_min >= 0.0 && eps_min <= 1.0)) throw ConfigError("eps_min must lie in [0, 1]");
  if (!rate_ok(eps_decay)) throw ConfigError("eps_decay must lie in (0, 1]");
  if (!(slow_rate >= 0.0 && slow_rate <= 1.0)) throw ConfigError("slow_rate must lie in [0, 1]");
  if (!(fast_divisor > 0.0)) throw ConfigError("fast_divisor must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (kind == PolicyKind::WiqlFu) {
    if (grid_points == 0) throw ConfigError("grid_points must be positive");
    if (grid_points >= 2 && !(grid_lo < grid_hi)) throw ConfigError("grid_lo must be < grid_hi");
    if (eval_window == 0) throw ConfigError("eval_window must be positive");
  }
}

nlohmann::json policy_config_to_json(const PolicyConfig& cfg) {
  nlohmann::json j = {{"kind", to_string(cfg.kind)}, {"label", cfg.display_name()}};
  switch (cfg.kind) {
    case PolicyKind::WiqlUcb:
      j["gamma"] = cfg.gamma;
      break;
    case PolicyKind::WiqlBiswas:
      j["gamma"] = cfg.gamma;
      j["epsilon0"] = cfg.epsilon0.value_or(1.0);
      break;
    case PolicyKind::WiqlAb:
      j["fast_divisor"] = cfg.fast_divisor;
      j["slow_rate"] = cfg.slow_rate;
      j["slow_decay"] = cfg.slow_decay;
      break;
    case PolicyKind::WiqlFu:
      j["grid_lo"] = cfg.grid_lo;
      j["grid_hi"] = cfg.grid_hi;
      j["grid_points"] = cfg.grid_points;
      j["eval_window"] = cfg.eval_window;
      break;
    case PolicyKind::JointQ:
      j["gamma"] = cfg.gamma;
      j["epsilon0"] = cfg.epsilon0.value_or(0.1);
      j["eps_min"] = cfg.eps_min;
      j["eps_decay"] = cfg.eps_decay;
      j["table_cap"] = cfg.table_cap;
      break;
    default:
      break;
  }
  return j;
}

PolicyConfig policy_config_from_json(const nlohmann::json& j) {
  PolicyConfig cfg;
  cfg.kind = policy_kind_from_string(j.at("kind").get<std::string>());
  cfg.label = j.value("label", std::string());
  cfg.gamma = j.value("gamma", cfg.gamma);
  if (j.contains("epsilon0")) cfg.epsilon0 = j["epsilon0"].get<double>();
  cfg.eps_min = j.value("eps_min", cfg.eps_min);
  cfg.eps_decay = j.value("eps_decay", cfg.eps_decay);
  cfg.fast_divisor = j.value("fast_divisor", cfg.fast_divisor);
  cfg.slow_rate = j.value("slow_rate", cfg.slow_rate);
  cfg.slow_decay = j.value("slow_decay", cfg.slow_decay);
  cfg.grid_lo = j.value("grid_lo", cfg.grid_lo);
  cfg.grid_hi = j.value("grid_hi", cfg.grid_hi);
  cfg.grid_points = j.value("grid_points", cfg.grid_points);
  cfg.eval_window = j.value("eval_window", cfg.eval_window);
  cfg.table_cap = j.value("table_cap", cfg.table_cap);
  cfg.validate();
  return cfg;
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, const EnvContext& env) {
  cfg.validate();
  const std::size_t n = env.state_sizes.size();
  check_budget(n, env.budget_m);
  const auto need_models = [&]() -> const std::vector<ArmModel>& {
    if (!env.arms)
      throw ConfigError(to_string(cfg.kind) + " needs the true transition matrices");
    return *env.arms;
  };
  switch (cfg.kind) {
    case PolicyKind::Oracle:
      return std::make_unique<OraclePolicy>(need_models(), env.budget_m);
    case PolicyKind::WiqlUcb:
      return std::make_unique<WiqlUcbPolicy>(env.state_sizes, env.budget_m, cfg.gamma);
    case PolicyKind::WiqlBiswas:
      return std::make_unique<WiqlBiswasPolicy>(env.state_sizes, env.budget_m,
                                                cfg.epsilon0.value_or(1.0), cfg.gamma);
    case PolicyKind::WiqlAb:
      return std::make_unique<WiqlAbPolicy>(env.state_sizes, env.budget_m, cfg);
    case PolicyKind::WiqlFu:
      return std::make_unique<WiqlFuPolicy>(env.state_sizes, env.budget_m, cfg);
    case PolicyKind::JointQ:
      return std::make_unique<JointQPolicy>(env.state_sizes, env.budget_m, cfg);
    case PolicyKind::Greedy:
      return std::make_unique<GreedyPolicy>(need_models(), env.budget_m);
    case PolicyKind::RoundRobin:
      return std::make_unique<RoundRobinPolicy>(n, env.budget_m);
    case PolicyKind::AoiGreedy:
      return std::make_unique<AoiGreedyPolicy>(env.budget_m);
  }
  throw ConfigError("unhandled policy kind");
}

// ---------------------------------------------------------------------------
// PerArmQLearner

PerArmQLearner::PerArmQLearner(std::vector<std::size_t> state_sizes, double gamma)
    : sizes_(std::move(state_sizes)), gamma_(gamma) {
  std::size_t total = 0;
  offsets_.reserve(sizes_.size());
  for (std::size_t n : sizes_) {
    offsets_.push_back(total);
    total += n;
  }
  q_.assign(2 * total, 0.0);
  c_.assign(2 * total, 0);
  lam_.assign(total, 0.0);
}

void PerArmQLearner::update(std::size_t arm, StateIndex s, ActionFlag a, double reward,
                            StateIndex s_next) {
  const std::size_t base = offsets_[arm];
  const std::size_t k = 2 * (base + s) + to_index(a);
  c_[k] += 1;
  const double alpha = 1.0 / (1.0 + static_cast<double>(c_[k]));
  const std::size_t kn = 2 * (base + s_next);
  const double target = reward + gamma_ * std::max(q_[kn], q_[kn + 1]);
  q_[k] = (1.0 - alpha) * q_[k] + alpha * target;
  lam_[base + s] = q_[2 * (base + s) + 1] - q_[2 * (base + s)];
}

void PerArmQLearner::update_all(const TransitionBatch& batch) {
  for (std::size_t i = 0; i < batch.states.size(); ++i)
    update(i, batch.states[i], batch.actions[i], batch.rewards[i], batch.next_states[i]);
}

void PerArmQLearner::set_q(std::size_t arm, StateIndex s, ActionFlag a, double value) {
  const std::size_t base = offsets_[arm];
  q_[2 * (base + s) + to_index(a)] = value;
  lam_[base + s] = q_[2 * (base + s) + 1] - q_[2 * (base + s)];
}

nlohmann::json PerArmQLearner::snapshot() const {
  nlohmann::json arms = nlohmann::json::array();
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    nlohmann::json q = nlohmann::json::array(), c = nlohmann::json::array(),
                   lam = nlohmann::json::array();
    for (StateIndex s = 0; s < sizes_[i]; ++s) {
      q.push_back({this->q(i, s, ActionFlag::Passive), this->q(i, s, ActionFlag::Active)});
      c.push_back({count(i, s, ActionFlag::Passive), count(i, s, ActionFlag::Active)});
      lam.push_back(lambda(i, s));
    }
    arms.push_back({{"q", q}, {"counts", c}, {"lambda", lam}});
  }
  return {{"arms", arms}};
}

// ---------------------------------------------------------------------------
// WIQL-UCB

WiqlUcbPolicy::WiqlUcbPolicy(std::vector<std::size_t> state_sizes, std::size_t m, double gamma)
    : learner_(std::move(state_sizes), gamma), m_(m) {
  check_budget(learner_.num_arms(), m_);
}

std::vector<double> WiqlUcbPolicy::ucb_scores(std::span<const StateIndex> states,
                                              double t) const {
  const double log_t = std::log(std::max(t, 1.0));
  std::vector<double> scores(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const StateIndex s = states[i];
    const double visits = static_cast<double>(learner_.count(i, s, ActionFlag::Passive) +
                                              learner_.count(i, s, ActionFlag::Active));
    scores[i] = learner_.lambda(i, s) + std::sqrt(2.0 * log_t / (1.0 + visits));
  }
  return scores;
}

std::vector<ActionFlag> WiqlUcbPolicy::select(const Observation& obs, RngStream& rng) {
  return top_m_actions(ucb_scores(obs.states, static_cast<double>(obs.t)), m_, rng);
}

// ---------------------------------------------------------------------------
// Adaptive epsilon-greedy

WiqlBiswasPolicy::WiqlBiswasPolicy(std::vector<std::size_t> state_sizes, std::size_t m,
                                   double epsilon0, double gamma)
    : learner_(std::move(state_sizes), gamma), m_(m), epsilon0_(epsilon0) {
  check_budget(learner_.num_arms(), m_);
}

double WiqlBiswasPolicy::epsilon(std::int64_t t) const {
  if (forced_) return *forced_;
  const double n = static_cast<double>(learner_.num_arms());
  return epsilon0_ * n / (n + static_cast<double>(t));
}

std::vector<ActionFlag> WiqlBiswasPolicy::select(const Observation& obs, RngStream& rng) {
  const std::size_t n = obs.states.size();
  if (rng.uniform() < epsilon(obs.t)) return random_actions(n, m_, rng);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = learner_.lambda(i, obs.states[i]);
  return top_m_actions(scores, m_, rng);
}

// ---------------------------------------------------------------------------
// Two-timescale

WiqlAbPolicy::WiqlAbPolicy(std::vector<std::size_t> state_sizes, std::size_t m,
                           const PolicyConfig& cfg)
    : n_(shared_state_size(state_sizes, "wiql_ab")), m_(m), cfg_(cfg) {
  check_budget(state_sizes.size(), m_);
  q_.assign(n_ * n_ * 2, 0.0);
  q_sum_.assign(n_, 0.0);
  c_.assign(n_ * 2, 0);
  lam_.assign(n_, 0.0);
}

double WiqlAbPolicy::fast_rate(std::uint64_t count) const {
  return 1.0 / (1.0 + std::ceil(static_cast<double>(count) / cfg_.fast_divisor));
}

double WiqlAbPolicy::slow_rate(std::int64_t t) const {
  return cfg_.slow_rate / (1.0 + cfg_.slow_decay * static_cast<double>(t));
}

void WiqlAbPolicy::set_q(StateIndex ref, StateIndex s, ActionFlag a, double value) {
  double& cell = q_[(ref * n_ + s) * 2 + to_index(a)];
  q_sum_[ref] += value - cell;
  cell = value;
}

void WiqlAbPolicy::fast_update(StateIndex s, ActionFlag a, double reward, StateIndex s_next) {
  const std::size_t ck = s * 2 + to_index(a);
  c_[ck] += 1;
  const double alpha = fast_rate(c_[ck]);
  const double entries = static_cast<double>(2 * n_);
  const double penalty_scale = a == ActionFlag::Active ? 1.0 : 0.0;
  for (StateIndex ref = 0; ref < n_; ++ref) {
    double* table = &q_[ref * n_ * 2];
    const double offset = q_sum_[ref] / entries;
    const double best_next = std::max(table[s_next * 2], table[s_next * 2 + 1]);
    double& cell = table[ck];
    const double target = reward - penalty_scale * lam_[ref] + best_next - offset;
    const double delta = alpha * (target - cell);
    cell += delta;
    q_sum_[ref] += delta;
  }
}

void WiqlAbPolicy::update_lambdas(std::int64_t t) {
  const double beta = slow_rate(t);
  for (StateIndex ref = 0; ref < n_; ++ref)
    lam_[ref] += beta * (q(ref, ref, ActionFlag::Active) - q(ref, ref, ActionFlag::Passive));
}

void WiqlAbPolicy::update(const TransitionBatch& batch) {
  for (std::size_t i = 0; i < batch.states.size(); ++i)
    fast_update(batch.states[i], batch.actions[i], batch.rewards[i], batch.next_states[i]);
  update_lambdas(++t_);
}

std::vector<ActionFlag> WiqlAbPolicy::select(const Observation& obs, RngStream& rng) {
  std::vector<double> scores(obs.states.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = lam_[obs.states[i]];
  return top_m_actions(scores, m_, rng);
}

std::size_t WiqlAbPolicy::stored_values() const {
  return q_.size() + c_.size() + lam_.size();
}

nlohmann::json WiqlAbPolicy::snapshot() const {
  return {{"lambda", lam_}, {"q", q_}, {"counts", c_}};
}

// ---------------------------------------------------------------------------
// Grid search

WiqlFuPolicy::WiqlFuPolicy(std::vector<std::size_t> state_sizes, std::size_t m,
                           const PolicyConfig& cfg)
    : n_(shared_state_size(state_sizes, "wiql_fu")), m_(m), cfg_(cfg) {
  check_budget(state_sizes.size(), m_);
  const std::size_t g = cfg_.grid_points;
  grid_.resize(g);
  for (std::size_t k = 0; k < g; ++k)
    grid_[k] = g == 1 ? cfg_.grid_lo
                      : cfg_.grid_lo + (cfg_.grid_hi - cfg_.grid_lo) * static_cast<double>(k) /
                                           static_cast<double>(g - 1);
  q_.assign(g * n_ * 2, 0.0);
  q_sum_.assign(g, 0.0);
  c_.assign(n_ * 2, 0);
  index_.assign(n_, g == 1 ? grid_.front() : 0.0);
}

void WiqlFuPolicy::set_q(std::size_t g, StateIndex s, ActionFlag a, double value) {
  double& cell = q_[(g * n_ + s) * 2 + to_index(a)];
  q_sum_[g] += value - cell;
  cell = value;
}

void WiqlFuPolicy::update(const TransitionBatch& batch) {
  const double entries = static_cast<double>(2 * n_);
  for (std::size_t i = 0; i < batch.states.size(); ++i) {
    const StateIndex s = batch.states[i];
    const StateIndex s_next = batch.next_states[i];
    const ActionFlag a = batch.actions[i];
    const std::size_t ck = s * 2 + to_index(a);
    c_[ck] += 1;
    const double alpha = 1.0 / (1.0 + static_cast<double>(c_[ck]));
    const double active = a == ActionFlag::Active ? 1.0 : 0.0;
    for (std::size_t g = 0; g < grid_.size(); ++g) {
      double* table = &q_[g * n_ * 2];
      const double best_next = std::max(table[s_next * 2], table[s_next * 2 + 1]);
      const double target =
          batch.rewards[i] - active * grid_[g] + best_next - q_sum_[g] / entries;
      const double delta = alpha * (target - table[ck]);
      table[ck] += delta;
      q_sum_[g] += delta;
    }
  }
  if (++steps_ % static_cast<std::int64_t>(cfg_.eval_window) == 0) rescore();
}

void WiqlFuPolicy::rescore() {
  for (StateIndex s = 0; s < n_; ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid_.size(); ++g) {
      const double gap = std::abs(q(g, s, ActionFlag::Active) - q(g, s, ActionFlag::Passive));
      if (gap < best) {
        best = gap;
        index_[s] = grid_[g];
      }
    }
  }
}

std::vector<ActionFlag> WiqlFuPolicy::select(const Observation& obs, RngStream& rng) {
  std::vector<double> scores(obs.states.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = index_[obs.states[i]];
  return top_m_actions(scores, m_, rng);
}

std::size_t WiqlFuPolicy::stored_values() const {
  return q_.size() + c_.size() + index_.size();
}

nlohmann::json WiqlFuPolicy::snapshot() const {
  return {{"grid", grid_}, {"indices", index_}, {"counts", c_}};
}

// ---------------------------------------------------------------------------
// Joint Q-learning

double JointQPolicy::required_entries(std::span<const std::size_t> state_sizes, std::size_t m) {
  double joint = 1.0;
  for (std::size_t n : state_sizes) joint *= static_cast<double>(n);
  const std::size_t n = state_sizes.size();
  double subsets = 1.0;
  for (std::size_t k = 1; k <= m; ++k)
    subsets = subsets * static_cast<double>(n - m + k) / static_cast<double>(k);
  return joint * std::round(subsets);
}

JointQPolicy::JointQPolicy(std::vector<std::size_t> state_sizes, std::size_t m,
                           const PolicyConfig& cfg)
    : sizes_(std::move(state_sizes)), m_(m), cfg_(cfg), eps_(cfg.epsilon0.value_or(0.1)) {
  check_budget(sizes_.size(), m_);
  const double need = required_entries(sizes_, m_);
  if (need > cfg_.table_cap) throw CapacityExceeded(need, cfg_.table_cap);
  for (std::size_t n : sizes_) num_joint_ *= n;
  // Lexicographic M-subsets of {0..N-1}.
  const std::size_t n = sizes_.size();
  std::vector<std::size_t> comb(m_);
  for (std::size_t i = 0; i < m_; ++i) comb[i] = i;
  while (true) {
    subsets_.push_back(comb);
    std::size_t i = m_;
    while (i > 0 && comb[i - 1] == n - m_ + (i - 1)) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < m_; ++j) comb[j] = comb[j - 1] + 1;
  }
  q_.assign(num_joint_ * subsets_.size(), 0.0);
  c_.assign(q_.size(), 0);
}

std::size_t JointQPolicy::encode(std::span<const StateIndex> states) const {
  std::size_t code = 0;
  for (std::size_t i = 0; i < states.size(); ++i) code = code * sizes_[i] + states[i];
  return code;
}

std::size_t JointQPolicy::subset_index(std::span<const ActionFlag> actions) const {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == ActionFlag::Active) active.push_back(i);
  const auto it = std::lower_bound(subsets_.begin(), subsets_.end(), active);
  if (it == subsets_.end() || *it != active) throw BudgetViolation(active.size(), m_);
  return static_cast<std::size_t>(it - subsets_.begin());
}

void JointQPolicy::set_q(std::size_t joint, std::size_t action, double value) {
  q_[joint * subsets_.size() + action] = value;
}

std::vector<ActionFlag> JointQPolicy::select(const Observation& obs, RngStream& rng) {
  const std::size_t n = obs.states.size();
  std::size_t k;
  if (rng.uniform() < eps_) {
    k = rng.uniform_index(subsets_.size());
  } else {
    const std::size_t joint = encode(obs.states);
    const double* row = &q_[joint * subsets_.size()];
    // Uniform among the maximizers via reservoir sampling.
    k = 0;
    std::size_t ties = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < subsets_.size(); ++a) {
      if (row[a] > best) {
        best = row[a];
        k = a;
        ties = 1;
      } else if (row[a] == best && rng.uniform_index(++ties) == 0) {
        k = a;
      }
    }
  }
  if (!eps_forced_) eps_ = std::max(cfg_.eps_min, eps_ * cfg_.eps_decay);
  std::vector<ActionFlag> actions(n, ActionFlag::Passive);
  for (std::size_t i : subsets_[k]) actions[i] = ActionFlag::Active;
  return actions;
}

void JointQPolicy::update(const TransitionBatch& batch) {
  const std::size_t joint = encode(batch.states);
  const std::size_t next = encode(batch.next_states);
  const std::size_t a = subset_index(batch.actions);
  double reward = 0.0;
  for (double r : batch.rewards) reward += r;
  const std::size_t width = subsets_.size();
  const double best_next =
      *std::max_element(q_.begin() + static_cast<std::ptrdiff_t>(next * width),
                        q_.begin() + static_cast<std::ptrdiff_t>((next + 1) * width));
  const std::size_t k = joint * width + a;
  c_[k] += 1;
  const double alpha = 1.0 / (1.0 + static_cast<double>(c_[k]));
  q_[k] = (1.0 - alpha) * q_[k] + alpha * (reward + cfg_.gamma * best_next);
}

nlohmann::json JointQPolicy::snapshot() const {
  return {{"joint_states", num_joint_}, {"subsets", subsets_.size()}, {"epsilon", eps_}};
}

// ---------------------------------------------------------------------------
// Heuristics and the informed benchmark

double GreedyPolicy::advantage(const ArmModel& arm, StateIndex s) {
  const auto lookahead = [&](ActionFlag a) {
    double next = 0.0;
    const auto row = arm.kernel(a).row(s);
    for (StateIndex j = 0; j < row.size(); ++j)
      next += row[j] * reward_of(arm, j, ActionFlag::Passive);
    return reward_of(arm, s, a) + next;
  };
  return lookahead(ActionFlag::Active) - lookahead(ActionFlag::Passive);
}

GreedyPolicy::GreedyPolicy(const std::vector<ArmModel>& arms, std::size_t m) : m_(m) {
  check_budget(arms.size(), m_);
  on_dynamics_change(arms);
}

void GreedyPolicy::on_dynamics_change(const std::vector<ArmModel>& arms) {
  adv_.clear();
  for (const auto& arm : arms) {
    std::vector<double> row(arm.num_states());
    for (StateIndex s = 0; s < row.size(); ++s) row[s] = advantage(arm, s);
    adv_.push_back(std::move(row));
  }
}

std::vector<ActionFlag> GreedyPolicy::select(const Observation& obs, RngStream& rng) {
  std::vector<double> scores(obs.states.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = adv_[i][obs.states[i]];
  return top_m_actions(scores, m_, rng);
}

std::vector<ActionFlag> RoundRobinPolicy::select(const Observation& /*obs*/, RngStream& /*rng*/) {
  std::vector<ActionFlag> actions(n_, ActionFlag::Passive);
  for (std::size_t k = 0; k < m_; ++k) actions[(cursor_ + k) % n_] = ActionFlag::Active;
  cursor_ = (cursor_ + m_) % n_;
  return actions;
}

std::vector<ActionFlag> AoiGreedyPolicy::select(const Observation& obs, RngStream& rng) {
  std::vector<double> scores(obs.delays.begin(), obs.delays.end());
  return top_m_actions(scores, m_, rng);
}

OraclePolicy::OraclePolicy(const std::vector<ArmModel>& arms, std::size_t m) : m_(m) {
  check_budget(arms.size(), m_);
  on_dynamics_change(arms);
}

void OraclePolicy::on_dynamics_change(const std::vector<ArmModel>& arms) {
  tables_ = solve_tables(arms);
  for (const auto& t : tables_)
    for (std::size_t s = 0; s < t.converged.size(); ++s)
      if (!t.converged[s]) throw BracketFailure(s);
}

std::vector<ActionFlag> OraclePolicy::select(const Observation& obs, RngStream& rng) {
  return oracle_policy(tables_, obs.states, m_, rng);
}

std::size_t OraclePolicy::stored_values() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.indices.size();
  return n;
}

nlohmann::json OraclePolicy::snapshot() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : tables_) j.push_back(t.indices);
  return {{"indices", j}};
}

}  // namespace rmab
