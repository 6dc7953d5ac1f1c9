#include "rmab/sensing.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rmab/errors.hpp"

namespace rmab::sensing {

SensorTrace default_trace(const std::string& category, double amplitude) {
  SensorTrace tr;
  tr.amplitude = amplitude;
  tr.category = category;
  if (category == "A") {
    tr.period = 500.0;
    tr.noise_sigma = 0.2;
  } else if (category == "B") {
    tr.period = 200.0;
    tr.noise_sigma = 0.3;
  } else if (category == "C") {
    tr.period = 50.0;
    tr.noise_sigma = 0.5;
  } else {
    throw UnknownCategory(category);
  }
  return tr;
}

double simulate_temperature(const SensorTrace& trace, std::int64_t t, RngStream& rng) {
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / trace.period;
  return trace.baseline + trace.amplitude * std::sin(phase) + rng.normal(0.0, trace.noise_sigma);
}

EdgeState dewma_update(const EdgeState& state, double z, double dt) {
  if (!(dt > 0.0)) throw ZeroDt();
  EdgeState next = state;
  next.x1 = state.beta1 * z + (1.0 - state.beta1) * (state.x1 + state.x2 * dt);
  next.x2 = state.beta2 * (next.x1 - state.x1) / dt + (1.0 - state.beta2) * state.x2;
  return next;
}

std::pair<double, double> sink_extrapolate(const SinkEstimate& est, std::int64_t t) {
  const auto d = static_cast<double>(t - est.last_update);
  return {est.x1 + d * est.x2, est.x2};
}

double aoii_penalty(std::int64_t delay, double rate_estimate) {
  return static_cast<double>(delay) * std::abs(rate_estimate);
}

double aoii_delta(const SinkEstimate& est, std::int64_t t) {
  return aoii_penalty(aoi_of(est, t), sink_extrapolate(est, t).second);
}

std::int64_t aoi_of(const SinkEstimate& est, std::int64_t t) { return t - est.last_update; }

StateIndex discretize_aoii(double value, const DiscretizationSpec& spec) {
  if (spec.n_bins < 2 || !(spec.aoii_max > 0.0))
    throw ConfigError("discretization needs n_bins >= 2 and aoii_max > 0");
  if (value >= spec.aoii_max) return spec.n_bins - 1;
  const double width = spec.aoii_max / static_cast<double>(spec.n_bins);
  const auto bin = static_cast<StateIndex>(std::floor(std::max(value, 0.0) / width));
  return std::min(bin, spec.n_bins - 1);
}

bool channel_transmit(const ChannelModel& ch, RngStream& rng) {
  return rng.bernoulli(ch.success_prob);
}

TraceTable TraceTable::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  TraceTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.find("time") != std::string::npos) continue;
    std::stringstream ss(line);
    std::string t, id, reading;
    if (!std::getline(ss, t, ',') || !std::getline(ss, id, ',') || !std::getline(ss, reading))
      throw ConfigError("malformed trace line " + std::to_string(line_no));
    table.add(std::stoul(id), std::stoll(t), std::stod(reading));
  }
  return table;
}

double TraceTable::reading(std::size_t sensor, std::int64_t t) const {
  const auto it = data_.find({sensor, t});
  if (it == data_.end())
    throw ConfigError("trace has no reading for sensor " + std::to_string(sensor) + " at t=" +
                      std::to_string(t));
  return it->second;
}

double SensingParams::success_for(const std::string& category) const {
  const auto it = success_prob.find(category);
  return it == success_prob.end() ? default_success : it->second;
}

nlohmann::json sensing_params_to_json(const SensingParams& p) {
  nlohmann::json j = {{"amplitude", p.amplitude},
                      {"beta1", p.beta1},
                      {"beta2", p.beta2},
                      {"n_bins", p.discretization.n_bins},
                      {"aoii_max", p.discretization.aoii_max},
                      {"success_prob", p.success_prob},
                      {"default_success", p.default_success}};
  if (!p.trace_csv.empty()) j["trace_csv"] = p.trace_csv;
  return j;
}

SensingParams sensing_params_from_json(const nlohmann::json& j) {
  SensingParams p;
  p.amplitude = j.value("amplitude", p.amplitude);
  p.beta1 = j.value("beta1", p.beta1);
  p.beta2 = j.value("beta2", p.beta2);
  p.discretization.n_bins = j.value("n_bins", p.discretization.n_bins);
  p.discretization.aoii_max = j.value("aoii_max", p.discretization.aoii_max);
  if (j.contains("success_prob"))
    p.success_prob = j["success_prob"].get<std::map<std::string, double>>();
  p.default_success = j.value("default_success", p.default_success);
  p.trace_csv = j.value("trace_csv", std::string());
  const auto in_unit = [](double b) { return b > 0.0 && b < 1.0; };
  if (!in_unit(p.beta1) || !in_unit(p.beta2))
    throw ConfigError("smoothing factors must lie in (0, 1)");
  for (const auto& [label, prob] : p.success_prob)
    if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("success_prob must lie in [0, 1]");
  if (p.discretization.n_bins < 2 || !(p.discretization.aoii_max > 0.0))
    throw ConfigError("discretization needs n_bins >= 2 and aoii_max > 0");
  return p;
}

}  // namespace rmab::sensing
