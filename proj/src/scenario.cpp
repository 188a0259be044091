#include "qospred/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qospred {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view s) {
  if (s == "A" || s == "a") return Scenario::A;
  if (s == "B" || s == "b") return Scenario::B;
  if (s == "C" || s == "c") return Scenario::C;
  return std::nullopt;
}

void ScenarioConfig::validate() const {
  if (!(sample_period_min > 0.0)) throw std::invalid_argument("sample period must be positive");
  if (!(duration_min >= sample_period_min)) {
    throw std::invalid_argument("duration must be at least one sample period");
  }
  if (!(noise_std_mw >= 0.0)) throw std::invalid_argument("noise must be nonnegative");
  if (!std::isfinite(base_production_mw) || !std::isfinite(drift_mw_per_min)) {
    throw std::invalid_argument("production parameters must be finite");
  }
}

MeanPath scenario_mean(const ScenarioConfig& cfg, double t) {
  const double production = cfg.base_production_mw + cfg.drift_mw_per_min * t;
  switch (cfg.scenario) {
    case Scenario::A: return {production, production};
    case Scenario::B: return {production, cfg.overproduction_factor * production};
    case Scenario::C: return {production, cfg.base_production_mw + 2.0 * cfg.drift_mw_per_min * t};
  }
  return {production, production};
}

std::vector<Event> generate(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto samples = static_cast<std::size_t>(std::floor(cfg.duration_min / cfg.sample_period_min + 1e-9)) + 1;

  std::vector<Event> out;
  out.reserve(2 * samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) * cfg.sample_period_min;
    const MeanPath m = scenario_mean(cfg, t);
    const double ep = m.production + cfg.noise_std_mw * noise(rng);
    const double ec = m.consumption + cfg.noise_std_mw * noise(rng);
    const Timestamp ts = cfg.start + std::chrono::milliseconds{std::llround(t * 60000.0)};
    out.push_back({ts, cfg.producer, EventKind::SmartMeterMeasure, ep, std::nullopt});
    out.push_back({ts, cfg.consumer, EventKind::SmartMeterMeasure, ec, std::nullopt});
  }
  return out;
}

BirthDeathRates nominal_rates(const ScenarioConfig& cfg, double width) {
  cfg.validate();
  if (!(width > 0.0)) throw std::invalid_argument("interval width must be positive");
  const double p = cfg.sample_period_min;
  const MeanPath a = scenario_mean(cfg, 0.0);
  const MeanPath b = scenario_mean(cfg, p);
  const double m = ((b.production - b.consumption) - (a.production - a.consumption)) / width;
  const double s = 2.0 * cfg.noise_std_mw / width;

  double up = std::max(m, 0.0);
  double down = std::max(-m, 0.0);
  if (s > 0.0) {
    const double z = m / s;
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    up = m * cdf + s * pdf;
    down = up - m;
  }
  return {up / p, down / p};
}

}  // namespace qospred
