#include "qospred/estimator.hpp"

#include <cmath>
#include <string>

#include "qospred/log.hpp"

namespace qospred {

double ewma_update(double rho, double y_prev, double y_cur, double alpha) {
  return alpha * (y_cur - y_prev) + (1.0 - alpha) * rho;
}

BirthDeathRates windowed_rates(const std::deque<Jump>& history, double w, double now) {
  if (!(w > 0.0)) throw EstimatorError("window length must be positive");
  double up = 0.0;
  double down = 0.0;
  for (const auto& j : history) {
    if (j.timestamp <= now - w || j.timestamp > now) continue;
    if (j.intervals > 0.0) {
      up += j.intervals;
    } else {
      down -= j.intervals;
    }
  }
  return {up / w, down / w};
}

BirthDeathRates windowed_rates(const std::deque<Jump>& history, double w) {
  if (history.empty()) return {0.0, 0.0};
  return windowed_rates(history, w, history.back().timestamp);
}

RateEstimator::RateEstimator(double alpha, EstimationMode mode, double window_w) : mode_(mode) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw EstimatorError("alpha must lie in (0, 1]");
  if (!(window_w > 0.0)) throw EstimatorError("window length must be positive");
  params_.alpha = alpha;
  params_.window_w = window_w;
}

const RateParams& RateEstimator::observe(double t, double value, double width) {
  if (!std::isfinite(t) || !std::isfinite(value)) {
    throw EstimatorError("non-finite sample rejected");
  }
  if (!(width > 0.0) || !std::isfinite(width)) throw EstimatorError("interval width must be positive");
  if (params_.last_timestamp && t < *params_.last_timestamp) {
    throw EstimatorError("sample timestamp " + std::to_string(t) + " precedes previous sample");
  }
  auto& p = params_;
  if (!p.last_value) {
    p.last_value = value;
    p.last_timestamp = t;
    return p;
  }

  const double d = (value - *p.last_value) / width;
  const double gap = t - *p.last_timestamp;
  p.last_value = value;
  p.last_timestamp = t;

  if (mode_ == EstimationMode::Windowed) {
    if (d != 0.0) history_.push_back({t, d});
    while (!history_.empty() && history_.front().timestamp <= t - p.window_w) history_.pop_front();
    const auto r = windowed_rates(history_, p.window_w, t);
    p.lambda_t = r.lambda;
    p.mu_t = r.mu;
    return p;
  }

  const double a = p.alpha;
  if (d > 0.0) {
    p.rho_up = ewma_update(p.rho_up, 0.0, d, a);
    p.rho_down = (1.0 - a) * p.rho_down;
  } else if (d < 0.0) {
    p.rho_down = ewma_update(p.rho_down, 0.0, -d, a);
    p.rho_up = (1.0 - a) * p.rho_up;
  } else {
    p.rho_up = (1.0 - a) * p.rho_up;
    p.rho_down = (1.0 - a) * p.rho_down;
  }
  if (gap > 0.0) {
    p.lambda_t = std::max(p.rho_up, 0.0) / gap;
    p.mu_t = std::max(p.rho_down, 0.0) / gap;
  }
  return p;
}

void RateEstimator::rescale(double old_width, double new_width) {
  if (!(old_width > 0.0 && new_width > 0.0)) throw EstimatorError("interval width must be positive");
  const double f = old_width / new_width;
  params_.rho_up *= f;
  params_.rho_down *= f;
  params_.lambda_t *= f;
  params_.mu_t *= f;
  for (auto& j : history_) j.intervals *= f;
}

ResizeResult maybe_resize(const ValuePartition& partition, StateIndex state,
                          const ResizePolicy& policy) {
  partition.validate();
  const double n = static_cast<double>(partition.n_intervals);
  ResizeResult out{partition, state, false};
  const double value = state_value(partition, state);

  if (static_cast<double>(state) <= policy.low_fraction * n) {
    if (partition.n_intervals * 2 > policy.n_max) {
      log::debug("queue length already at maximum " + std::to_string(policy.n_max));
      return out;
    }
    out.partition.n_intervals = partition.n_intervals * 2;
  } else if (static_cast<double>(state) >= policy.high_fraction * n) {
    const std::size_t halved = partition.n_intervals / 2;
    if (halved < policy.n_min || halved == 0) {
      log::warn("queue length " + std::to_string(partition.n_intervals) +
                " cannot be halved below minimum " + std::to_string(policy.n_min));
      return out;
    }
    out.partition.n_intervals = halved;
  } else {
    return out;
  }
  out.state = value_to_state(out.partition, value);
  out.changed = true;
  return out;
}

}  // namespace qospred
