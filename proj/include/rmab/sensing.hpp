#pragma once

// Synthetic temperature sensors, node-side level/rate smoothing, sink-side
// extrapolation, and the age-of-incorrect-information state fed to policies.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rmab/core.hpp"

namespace rmab::sensing {

struct SensorTrace {
  double amplitude = 5.0;  // degC
  double period = 500.0;   // steps
  double noise_sigma = 0.2;
  double baseline = 20.0;
  std::string category = "A";
};

/// Published period and noise per category; amplitude is configurable.
SensorTrace default_trace(const std::string& category, double amplitude = 5.0);

/// baseline + A sin(2 pi t / P) + N(0, sigma). One Gaussian draw when sigma > 0.
double simulate_temperature(const SensorTrace& trace, std::int64_t t, RngStream& rng);

struct EdgeState {
  double x1 = 0.0;  // level
  double x2 = 0.0;  // rate per step
  double beta1 = 0.5;
  double beta2 = 0.5;
};

/// Level update first, then the rate update from the new level. Throws ZeroDt.
EdgeState dewma_update(const EdgeState& state, double z, double dt);

struct SinkEstimate {
  double x1 = 0.0;  // last received level
  double x2 = 0.0;  // last received rate
  std::int64_t last_update = 0;  // u
};

/// (x1(u) + (t - u) x2(u), x2(u)).
std::pair<double, double> sink_extrapolate(const SinkEstimate& est, std::int64_t t);

/// (t - u) * |x2_hat(t)|.
double aoii_delta(const SinkEstimate& est, std::int64_t t);

/// t - u.
std::int64_t aoi_of(const SinkEstimate& est, std::int64_t t);

/// Generic penalty f(t) * g(x, x_hat) with f = delay and g = |rate estimate|.
double aoii_penalty(std::int64_t delay, double rate_estimate);

struct DiscretizationSpec {
  std::size_t n_bins = 5;
  double aoii_max = 10.0;
};

/// Uniform bins over [0, aoii_max]; values at or above aoii_max land in the top bin.
StateIndex discretize_aoii(double value, const DiscretizationSpec& spec);

struct ChannelModel {
  double success_prob = 0.9;
};

bool channel_transmit(const ChannelModel& ch, RngStream& rng);

/// Readings keyed by (sensor, time) loaded from CSV columns time,sensor_id,reading.
class TraceTable {
 public:
  static TraceTable from_csv(const std::string& path);
  void add(std::size_t sensor, std::int64_t t, double reading) { data_[{sensor, t}] = reading; }
  /// Throws ConfigError when the reading is missing.
  double reading(std::size_t sensor, std::int64_t t) const;
  std::size_t size() const { return data_.size(); }

 private:
  std::map<std::pair<std::size_t, std::int64_t>, double> data_;
};

struct SensingParams {
  double amplitude = 5.0;
  double beta1 = 0.5;
  double beta2 = 0.5;
  DiscretizationSpec discretization;
  /// Channel success per category; categories not listed use default_success.
  std::map<std::string, double> success_prob;
  double default_success = 0.9;
  /// Optional CSV replacing the synthetic readings.
  std::string trace_csv;

  double success_for(const std::string& category) const;
};

nlohmann::json sensing_params_to_json(const SensingParams& p);
SensingParams sensing_params_from_json(const nlohmann::json& j);

}  // namespace rmab::sensing
