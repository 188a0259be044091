#include "qospred/queue_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qospred {

std::string_view to_string(ValueClass c) {
  switch (c) {
    case ValueClass::Admissible: return "admissible";
    case ValueClass::Critical: return "critical";
    case ValueClass::Inadmissible: return "inadmissible";
  }
  return "?";
}

void ValuePartition::validate() const {
  const bool finite = std::isfinite(min_b) && std::isfinite(max_b) && std::isfinite(lo_cri) &&
                      std::isfinite(lo_adm) && std::isfinite(hi_adm) && std::isfinite(hi_cri);
  if (!finite) throw ModelError("partition bounds must be finite");
  if (n_intervals == 0) throw ModelError("partition needs at least one interval");
  if (!(max_b > min_b)) throw ModelError("partition range is empty");
  if (!(min_b <= lo_cri && lo_cri < lo_adm && lo_adm <= hi_adm && hi_adm < hi_cri &&
        hi_cri <= max_b)) {
    throw ModelError("thresholds must satisfy min_b <= lo_cri < lo_adm <= hi_adm < hi_cri <= max_b");
  }
}

ValueClass classify_value(const ValuePartition& p, double v) {
  if (p.lo_adm <= v && v <= p.hi_adm) return ValueClass::Admissible;
  if ((p.lo_cri <= v && v < p.lo_adm) || (p.hi_adm < v && v <= p.hi_cri)) {
    return ValueClass::Critical;
  }
  return ValueClass::Inadmissible;
}

StateIndex value_to_state(const ValuePartition& p, double value) {
  if (std::isnan(value)) throw ModelError("cannot map NaN to a queue state");
  const double v = std::clamp(value, p.min_b, p.max_b);
  const double pos = static_cast<double>(p.n_intervals) * (v - p.min_b) / (p.max_b - p.min_b);
  // Snap values sitting on an interval edge up to rounding error.
  const double snapped = std::nearbyint(pos);
  const double idx = std::abs(pos - snapped) < 1e-9 ? snapped : std::floor(pos);
  return std::min(static_cast<StateIndex>(idx), p.n_intervals);
}

double state_value(const ValuePartition& p, StateIndex state) {
  if (state == p.n_intervals) return p.max_b;
  return p.min_b + static_cast<double>(state) * p.width();
}

ValueClass state_class(const ValuePartition& p, StateIndex state) {
  return classify_value(p, state_value(p, state));
}

namespace {

std::map<std::string, std::vector<StateIndex>> class_labels(
    const ValuePartition& p, std::size_t n_states,
    const std::vector<std::size_t>& primary_digit) {
  std::map<std::string, std::vector<StateIndex>> labels{
      {kAdmissibleLabel, {}}, {kCriticalLabel, {}}, {kViolationLabel, {}}};
  std::vector<ValueClass> cls(p.num_states());
  for (StateIndex i = 0; i < p.num_states(); ++i) cls[i] = state_class(p, i);
  for (StateIndex s = 0; s < n_states; ++s) {
    switch (cls[primary_digit[s]]) {
      case ValueClass::Admissible: labels[kAdmissibleLabel].push_back(s); break;
      case ValueClass::Critical: labels[kCriticalLabel].push_back(s); break;
      case ValueClass::Inadmissible: labels[kViolationLabel].push_back(s); break;
    }
  }
  return labels;
}

void check_spec(const QueueSpec& spec) {
  spec.partition.validate();
  const auto& r = spec.rates;
  if (!(r.lambda >= 0.0 && r.mu >= 0.0) || !std::isfinite(r.lambda) || !std::isfinite(r.mu)) {
    throw ModelError("queue '" + spec.name + "': rates must be finite and nonnegative");
  }
  if (r.lambda == 0.0 && r.mu == 0.0) {
    throw ModelError("queue '" + spec.name + "': both rates are zero (degenerate chain)");
  }
}

}  // namespace

Ctmc build_birth_death(const QueueSpec& spec) {
  return compose_network({spec});
}

Ctmc build_frozen_queue(const ValuePartition& partition, double current_value) {
  partition.validate();
  const std::size_t n = partition.num_states();
  std::vector<std::size_t> digit(n);
  for (std::size_t i = 0; i < n; ++i) digit[i] = i;
  return Ctmc::build(n, {}, class_labels(partition, n, digit),
                     value_to_state(partition, current_value));
}

Ctmc compose_network(const std::vector<QueueSpec>& specs, std::size_t state_cap) {
  if (specs.empty() || specs.size() > 3) {
    throw ModelError("a queue network needs between one and three queues");
  }
  std::size_t total = 1;
  for (const auto& spec : specs) {
    check_spec(spec);
    const std::size_t k = spec.partition.num_states();
    if (total > state_cap / k) {
      throw ModelError("product state space exceeds the cap of " + std::to_string(state_cap) +
                       " states");
    }
    total *= k;
  }

  std::vector<std::size_t> stride(specs.size());
  std::size_t s = 1;
  for (std::size_t q = 0; q < specs.size(); ++q) {
    stride[q] = s;
    s *= specs[q].partition.num_states();
  }

  std::vector<Transition> transitions;
  std::size_t n_trans = 0;
  for (std::size_t q = 0; q < specs.size(); ++q) {
    const auto& r = specs[q].rates;
    const std::size_t edges = specs[q].partition.n_intervals * (total / specs[q].partition.num_states());
    n_trans += (r.lambda > 0.0 ? edges : 0) + (r.mu > 0.0 ? edges : 0);
  }
  transitions.reserve(n_trans);

  std::vector<std::size_t> primary_digit(total);
  const std::size_t primary_states = specs[0].partition.num_states();
  for (StateIndex state = 0; state < total; ++state) {
    primary_digit[state] = state % primary_states;
    for (std::size_t q = 0; q < specs.size(); ++q) {
      const std::size_t n = specs[q].partition.n_intervals;
      const std::size_t digit = (state / stride[q]) % (n + 1);
      const auto& r = specs[q].rates;
      if (digit < n && r.lambda > 0.0) transitions.push_back({state, state + stride[q], r.lambda});
      if (digit > 0 && r.mu > 0.0) transitions.push_back({state, state - stride[q], r.mu});
    }
  }

  StateIndex init = 0;
  for (std::size_t q = 0; q < specs.size(); ++q) {
    init += stride[q] * value_to_state(specs[q].partition, specs[q].current_value);
  }

  auto labels = class_labels(specs[0].partition, total, primary_digit);
  return Ctmc::build(total, std::move(transitions), std::move(labels), init);
}

}  // namespace qospred
