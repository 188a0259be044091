#include "qospred/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace qospred {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(std::string_view v) {
  double out = 0.0;
  const char* first = v.data();
  if (!v.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_uint(std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("expected a nonnegative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + std::string(v) + "'");
}

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Key {
  std::string_view name;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

UnderproductionConfig& under(Config& c) {
  if (!c.underproduction) c.underproduction = UnderproductionConfig{};
  return *c.underproduction;
}

#define QP_NUM(key, field)                                                   \
  Key {                                                                      \
    key, [](Config& c, std::string_view v) { c.field = to_double(v); },      \
        [](const Config& c) { return num(c.field); }                         \
  }
#define QP_SIZE(key, field)                                                           \
  Key {                                                                               \
    key, [](Config& c, std::string_view v) { c.field = static_cast<std::size_t>(to_uint(v)); }, \
        [](const Config& c) { return std::to_string(c.field); }                       \
  }
#define QP_STR(key, field)                                                             \
  Key {                                                                                \
    key, [](Config& c, std::string_view v) { c.field = std::string(v); },              \
        [](const Config& c) { return c.field; }                                        \
  }
#define QP_BOOL(key, field)                                                    \
  Key {                                                                        \
    key, [](Config& c, std::string_view v) { c.field = to_bool(v); },          \
        [](const Config& c) { return std::string(c.field ? "true" : "false"); } \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      QP_NUM("range.min", partition.min_b),
      QP_NUM("range.max", partition.max_b),
      QP_NUM("threshold.lo_cri", partition.lo_cri),
      QP_NUM("threshold.lo_adm", partition.lo_adm),
      QP_NUM("threshold.hi_adm", partition.hi_adm),
      QP_NUM("threshold.hi_cri", partition.hi_cri),
      QP_SIZE("queue.length", partition.n_intervals),
      Key{"estimator.mode",
          [](Config& c, std::string_view v) {
            if (v == "ewma") {
              c.mode = EstimationMode::Ewma;
            } else if (v == "windowed") {
              c.mode = EstimationMode::Windowed;
            } else {
              throw ConfigError("estimator.mode must be 'ewma' or 'windowed'");
            }
          },
          [](const Config& c) {
            return std::string(c.mode == EstimationMode::Ewma ? "ewma" : "windowed");
          }},
      QP_NUM("estimator.alpha", alpha),
      QP_NUM("estimator.window_min", window_min),
      QP_BOOL("resize.enabled", resize_enabled),
      QP_NUM("resize.low_fraction", resize.low_fraction),
      QP_NUM("resize.high_fraction", resize.high_fraction),
      QP_SIZE("resize.n_min", resize.n_min),
      QP_SIZE("resize.n_max", resize.n_max),
      QP_NUM("sample_period_min", sample_period_min),
      QP_NUM("predict.horizon_min", horizon_min),
      QP_NUM("predict.alarm_threshold", alarm_threshold),
      QP_NUM("predict.epsilon", transient.epsilon),
      QP_STR("stream.producer", producer),
      QP_STR("stream.consumer", consumer),
      Key{"stream.order",
          [](Config& c, std::string_view v) {
            if (v == "reject") {
              c.order_policy = OrderPolicy::Reject;
            } else if (v == "warn") {
              c.order_policy = OrderPolicy::WarnAndDrop;
            } else {
              throw ConfigError("stream.order must be 'reject' or 'warn'");
            }
          },
          [](const Config& c) {
            return std::string(c.order_policy == OrderPolicy::Reject ? "reject" : "warn");
          }},
      QP_STR("kpi.name", kpi_name),
      Key{"underproduction.source",
          [](Config& c, std::string_view v) { under(c).source = std::string(v); },
          [](const Config& c) { return c.underproduction ? c.underproduction->source : ""; }},
      Key{"underproduction.threshold_mw",
          [](Config& c, std::string_view v) { under(c).threshold_mw = to_double(v); },
          [](const Config& c) {
            return c.underproduction ? num(c.underproduction->threshold_mw) : "";
          }},
      Key{"underproduction.window_min",
          [](Config& c, std::string_view v) { under(c).window_min = to_double(v); },
          [](const Config& c) {
            return c.underproduction ? num(c.underproduction->window_min) : "";
          }},
      QP_BOOL("output.timing", timing),
      QP_NUM("scenario.duration_min", scenario.duration_min),
      QP_NUM("scenario.base_production_mw", scenario.base_production_mw),
      QP_NUM("scenario.noise_std_mw", scenario.noise_std_mw),
      QP_NUM("scenario.drift_mw_per_min", scenario.drift_mw_per_min),
      QP_NUM("scenario.overproduction_factor", scenario.overproduction_factor),
      Key{"scenario.seed",
          [](Config& c, std::string_view v) { c.scenario.seed = to_uint(v); },
          [](const Config& c) { return std::to_string(c.scenario.seed); }},
      QP_NUM("plot.epsilon", plot_transient.epsilon),
  };
  return table;
}

#undef QP_NUM
#undef QP_SIZE
#undef QP_STR
#undef QP_BOOL

}  // namespace

void Config::validate() const {
  try {
    partition.validate();
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("estimator.alpha must lie in (0, 1]");
  if (!(window_min > 0.0)) throw ConfigError("estimator.window_min must be positive");
  if (!(resize.low_fraction >= 0.0 && resize.low_fraction < resize.high_fraction &&
        resize.high_fraction <= 1.0)) {
    throw ConfigError("resize fractions must satisfy 0 <= low < high <= 1");
  }
  if (resize.n_min == 0 || resize.n_min > resize.n_max) {
    throw ConfigError("resize bounds must satisfy 0 < n_min <= n_max");
  }
  if (!(sample_period_min * 60000.0 >= 1.0)) {
    throw ConfigError("sample_period_min must be at least one millisecond");
  }
  if (!(horizon_min > 0.0)) throw ConfigError("predict.horizon_min must be positive");
  if (!(alarm_threshold >= 0.0 && alarm_threshold <= 1.0)) {
    throw ConfigError("predict.alarm_threshold must lie in [0, 1]");
  }
  for (double eps : {transient.epsilon, plot_transient.epsilon}) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("truncation epsilon must lie in (0, 1)");
  }
  if (producer.empty() || consumer.empty() || producer == consumer) {
    throw ConfigError("stream.producer and stream.consumer must be distinct and nonempty");
  }
  if (underproduction) {
    if (underproduction->source.empty()) throw ConfigError("underproduction.source is required");
    if (!(underproduction->window_min > 0.0)) {
      throw ConfigError("underproduction.window_min must be positive");
    }
  }
  try {
    ScenarioConfig s = scenario;
    s.sample_period_min = sample_period_min;
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

Config parse_config(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto& table = keys();
    auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    try {
      it->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + std::string(key) + ": " + e.what());
    }
  }
  cfg.scenario.sample_period_min = cfg.sample_period_min;
  cfg.scenario.producer = cfg.producer;
  cfg.scenario.consumer = cfg.consumer;
  cfg.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string default_config_text() {
  const Config cfg;
  std::string out;
  for (const auto& k : keys()) {
    const std::string v = k.get(cfg);
    if (v.empty()) {
      out += "# " + std::string(k.name) + " =\n";
    } else {
      out += std::string(k.name) + " = " + v + "\n";
    }
  }
  return out;
}

}  // namespace qospred
