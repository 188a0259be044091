#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qospred/ctmc.hpp"
#include "qospred/estimator.hpp"
#include "qospred/events.hpp"
#include "qospred/queue_model.hpp"
#include "qospred/scenario.hpp"

namespace qospred {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnderproductionConfig {
  std::string source;
  double threshold_mw = 0.0;
  double window_min = 15.0;
};

/// Engine configuration. Defaults describe a smart-grid balance monitor:
/// balance range +/-400 MW in 40 intervals, admissible band +/-200 MW,
/// critical band up to +/-380 MW, 30 minute horizon, alarm at 0.05.
struct Config {
  ValuePartition partition;
  EstimationMode mode = EstimationMode::Ewma;
  double alpha = 0.5;
  double window_min = 60.0;
  bool resize_enabled = true;
  ResizePolicy resize;
  double sample_period_min = 15.0;
  double horizon_min = 30.0;
  double alarm_threshold = 0.05;
  TransientOptions transient;
  std::string producer = "EP";
  std::string consumer = "EC";
  std::string kpi_name = "balance";
  OrderPolicy order_policy = OrderPolicy::Reject;
  std::optional<UnderproductionConfig> underproduction;
  bool timing = false;
  /// Scenario generator parameters (simulate, plot-data).
  ScenarioConfig scenario;
  /// Truncation used by plot-data, fine enough to resolve far-from-goal states.
  TransientOptions plot_transient{1e-300};

  void validate() const;
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys are errors.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);

/// Every recognised key with its default, in file order.
std::string default_config_text();

}  // namespace qospred
