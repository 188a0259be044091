#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qospred/estimator.hpp"
#include "qospred/events.hpp"

namespace qospred {

/// A: consumption tracks production. B: consumers draw a fixed fraction of
/// production. C: consumption drifts twice as fast as production.
enum class Scenario { A, B, C };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view s);

struct ScenarioConfig {
  Scenario scenario = Scenario::A;
  double duration_min = 1440.0;
  double sample_period_min = 15.0;
  double base_production_mw = 500.0;
  double noise_std_mw = 20.0;
  /// Production drift in MW per minute; consumption follows per scenario.
  double drift_mw_per_min = 1.0;
  /// Consumption / production ratio in scenario B.
  double overproduction_factor = 0.8;
  std::uint64_t seed = 1;
  Timestamp start = Timestamp{std::chrono::sys_days{std::chrono::year{2014} / 1 / 1}};
  std::string producer = "EP";
  std::string consumer = "EC";

  void validate() const;
};

struct MeanPath {
  double production;
  double consumption;
};

/// Noise-free production and consumption at time t (minutes from start).
MeanPath scenario_mean(const ScenarioConfig& cfg, double t_min);

/// Seeded stream of paired EP/EC SmartMeterMeasure events, one pair per
/// sample period over [0, duration].
std::vector<Event> generate(const ScenarioConfig& cfg);

/// Expected EWMA rate estimate for the balance queue under the scenario:
/// per-sample balance differences are Gaussian with the scenario's mean
/// balance drift and variance 4 sigma^2, so rho_up settles at E[D+] and
/// rho_down at E[D-] (in interval units).
BirthDeathRates nominal_rates(const ScenarioConfig& cfg, double interval_width);

}  // namespace qospred
