#include <doctest.h>

#include "qospred/config.hpp"

using namespace qospred;

TEST_CASE("defaults round-trip through the text form") {
  const Config parsed = parse_config(default_config_text());
  const Config def;
  CHECK(parsed.partition == def.partition);
  CHECK(parsed.alpha == def.alpha);
  CHECK(parsed.horizon_min == def.horizon_min);
  CHECK(parsed.alarm_threshold == def.alarm_threshold);
  CHECK(parsed.resize.n_max == def.resize.n_max);
  CHECK(parsed.scenario.seed == def.scenario.seed);
  CHECK(parsed.plot_transient.epsilon == def.plot_transient.epsilon);
  CHECK_FALSE(parsed.underproduction);
}

TEST_CASE("parse_config") {
  const Config c = parse_config(R"(
# comment
queue.length = 80
estimator.alpha = 0.3   # trailing comment
estimator.mode = windowed
sample_period_min = 5
stream.producer = P1
stream.order = warn
underproduction.source = P1
underproduction.threshold_mw = 100
output.timing = true
)");
  CHECK(c.partition.n_intervals == 80);
  CHECK(c.alpha == 0.3);
  CHECK(c.mode == EstimationMode::Windowed);
  CHECK(c.sample_period_min == 5.0);
  CHECK(c.scenario.sample_period_min == 5.0);
  CHECK(c.scenario.producer == "P1");
  CHECK(c.order_policy == OrderPolicy::WarnAndDrop);
  REQUIRE(c.underproduction);
  CHECK(c.underproduction->threshold_mw == 100.0);
  CHECK(c.underproduction->window_min == 15.0);
  CHECK(c.timing);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("bogus.key = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("queue.length"), ConfigError);
  CHECK_THROWS_AS(parse_config("queue.length = -3"), ConfigError);
  CHECK_THROWS_AS(parse_config("estimator.alpha = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("estimator.alpha = 1.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("estimator.mode = other"), ConfigError);
  CHECK_THROWS_AS(parse_config("threshold.lo_adm = 300"), ConfigError);
  CHECK_THROWS_AS(parse_config("predict.alarm_threshold = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("sample_period_min = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("output.timing = maybe"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/qospred.conf"), ConfigError);
}
