#include <doctest.h>

#include <cmath>

#include "qospred/scenario.hpp"

using namespace qospred;

namespace {

std::vector<double> balances(const std::vector<Event>& events) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < events.size(); i += 2) {
    out.push_back(events[i].measure - events[i + 1].measure);
  }
  return out;
}

double slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("scenario A without noise is exactly balanced") {
  ScenarioConfig cfg;
  cfg.noise_std_mw = 0.0;
  const auto ev = generate(cfg);
  CHECK(ev.size() == 2 * 97);
  for (double b : balances(ev)) CHECK(b == 0.0);
}

TEST_CASE("scenario C consumption drifts twice as fast") {
  ScenarioConfig cfg;
  cfg.scenario = Scenario::C;
  cfg.seed = 12345;
  cfg.duration_min = 15.0 * 150;
  const auto ev = generate(cfg);
  std::vector<double> ep, ec;
  for (const auto& e : ev) (e.source == "EP" ? ep : ec).push_back(e.measure);
  REQUIRE(ep.size() >= 100);
  CHECK(std::abs(slope(ec) / slope(ep) - 2.0) <= 0.1);
  CHECK(slope(balances(ev)) < 0.0);
}

TEST_CASE("scenario A balance averages to zero") {
  ScenarioConfig cfg;
  cfg.seed = 77;
  cfg.duration_min = 15.0 * 2000;
  const auto b = balances(generate(cfg));
  double mean = 0.0;
  for (double x : b) mean += x;
  mean /= static_cast<double>(b.size());
  // The balance noise has standard deviation sqrt(2) * sigma.
  CHECK(std::abs(mean) < 3.0 * std::sqrt(2.0) * cfg.noise_std_mw / std::sqrt(double(b.size())));
}

TEST_CASE("scenario B overproduces") {
  ScenarioConfig cfg;
  cfg.scenario = Scenario::B;
  cfg.noise_std_mw = 0.0;
  const auto b = balances(generate(cfg));
  CHECK(b.front() == doctest::Approx(0.2 * cfg.base_production_mw));
  for (double x : b) CHECK(x > 0.0);
}

TEST_CASE("generation is seeded") {
  ScenarioConfig cfg;
  cfg.scenario = Scenario::C;
  cfg.seed = 9;
  CHECK(generate(cfg) == generate(cfg));
  ScenarioConfig other = cfg;
  other.seed = 10;
  CHECK_FALSE(generate(cfg) == generate(other));
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg;
  cfg.sample_period_min = 0.0;
  CHECK_THROWS(generate(cfg));
  cfg = {};
  cfg.duration_min = 5.0;
  CHECK_THROWS(generate(cfg));
  cfg = {};
  cfg.noise_std_mw = -1.0;
  CHECK_THROWS(generate(cfg));
}

TEST_CASE("nominal rates") {
  ScenarioConfig cfg;
  const auto a = nominal_rates(cfg, 20.0);
  CHECK(a.lambda == a.mu);
  // E|D|/2 for D ~ N(0, (2 sigma / w)^2): s * phi(0), per 15 minutes.
  CHECK(a.lambda == doctest::Approx(2.0 / std::sqrt(2.0 * M_PI) / 15.0));

  cfg.scenario = Scenario::C;
  const auto c = nominal_rates(cfg, 20.0);
  CHECK(c.mu > c.lambda);
  // Mean jump per sample equals the scenario drift in intervals.
  CHECK((c.lambda - c.mu) * 15.0 == doctest::Approx(-1.0 * 15.0 / 20.0));

  cfg.noise_std_mw = 0.0;
  const auto exact = nominal_rates(cfg, 20.0);
  CHECK(exact.lambda == 0.0);
  CHECK(exact.mu == doctest::Approx(1.0 / 20.0));
}
