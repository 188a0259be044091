#pragma once

#include <deque>
#include <optional>
#include <stdexcept>

#include "qospred/queue_model.hpp"

namespace qospred {

struct EstimatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// rho' = alpha (y_cur - y_prev) + (1 - alpha) rho
double ewma_update(double rho, double y_prev, double y_cur, double alpha);

enum class EstimationMode { Ewma, Windowed };

/// Snapshot of the estimator. Value type; the model builder always works on
/// a copy.
struct RateParams {
  double lambda_t = 0.0;  // increments per minute
  double mu_t = 0.0;      // decrements per minute
  double rho_up = 0.0;    // EWMA of positive jumps, intervals per sample
  double rho_down = 0.0;  // EWMA of |negative jumps|, intervals per sample
  double alpha = 0.5;
  double window_w = 60.0;  // minutes, windowed mode only
  std::optional<double> last_value;
  std::optional<double> last_timestamp;  // minutes

  BirthDeathRates rates() const { return {lambda_t, mu_t}; }
};

struct Jump {
  double timestamp;  // minutes
  double intervals;  // signed jump in queue-interval units
};

/// (sum of positive jumps, sum of |negative jumps|) inside the trailing
/// window (now - w, now], each divided by w.
BirthDeathRates windowed_rates(const std::deque<Jump>& history, double w, double now);
BirthDeathRates windowed_rates(const std::deque<Jump>& history, double w);

/// Per-KPI rate tracker. Single writer: one instance per stream.
class RateEstimator {
 public:
  RateEstimator(double alpha, EstimationMode mode = EstimationMode::Ewma, double window_w = 60.0);

  /// Feeds one KPI sample measured in value units against the interval
  /// width of the current partition. Throws EstimatorError on non-finite
  /// input or a timestamp earlier than the previous sample.
  const RateParams& observe(double timestamp_min, double value, double interval_width);

  /// Rescales the accumulators after the interval width changed.
  void rescale(double old_width, double new_width);

  const RateParams& params() const { return params_; }
  RateParams snapshot() const { return params_; }
  EstimationMode mode() const { return mode_; }

 private:
  RateParams params_;
  EstimationMode mode_;
  std::deque<Jump> history_;
};

struct ResizePolicy {
  double low_fraction = 0.1;
  double high_fraction = 0.9;
  std::size_t n_min = 10;
  std::size_t n_max = 320;
};

struct ResizeResult {
  ValuePartition partition;
  StateIndex state;
  bool changed = false;
};

/// Doubles N when the state sits at or below low_fraction * N and halves it
/// at or above high_fraction * N. Thresholds and range are untouched; the
/// state is re-mapped through its value.
ResizeResult maybe_resize(const ValuePartition& partition, StateIndex current_state,
                          const ResizePolicy& policy = {});

}  // namespace qospred
