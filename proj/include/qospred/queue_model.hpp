#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qospred/ctmc.hpp"

namespace qospred {

enum class ValueClass { Admissible, Critical, Inadmissible };

std::string_view to_string(ValueClass c);

inline constexpr const char* kAdmissibleLabel = "admissible";
inline constexpr const char* kCriticalLabel = "criticalState";
inline constexpr const char* kViolationLabel = "violState";

/// Discretized KPI value range with signed, ordered thresholds:
/// min_b <= lo_cri < lo_adm <= hi_adm < hi_cri <= max_b.
///
/// The range is cut into n_intervals intervals of equal width; queue state i
/// (0..N) stands for the value min_b + i * width.
struct ValuePartition {
  double min_b = -400.0;
  double max_b = 400.0;
  double lo_cri = -380.0;
  double lo_adm = -200.0;
  double hi_adm = 200.0;
  double hi_cri = 380.0;
  std::size_t n_intervals = 40;

  double width() const { return (max_b - min_b) / static_cast<double>(n_intervals); }
  std::size_t num_states() const { return n_intervals + 1; }
  /// Throws ModelError when the ordering or range invariants are broken.
  void validate() const;

  bool operator==(const ValuePartition&) const = default;
};

ValueClass classify_value(const ValuePartition& p, double value);

/// floor(N (v - min_b) / (max_b - min_b)) after clamping v into the range;
/// max_b maps to N.
StateIndex value_to_state(const ValuePartition& p, double value);

/// Value represented by a state (its lower interval edge).
double state_value(const ValuePartition& p, StateIndex state);

/// Class used to label a state: the class of its value. The range edges
/// are always labelled, so every queue length can represent violations.
ValueClass state_class(const ValuePartition& p, StateIndex state);

struct BirthDeathRates {
  double lambda = 0.0;  // increments, 1/minute
  double mu = 0.0;      // decrements, 1/minute
};

struct QueueSpec {
  std::string name = "balance";
  ValuePartition partition;
  BirthDeathRates rates;
  double current_value = 0.0;
};

/// Birth-death chain over N+1 queue states with admissible / criticalState /
/// violState labels and the initial state taken from the current value.
Ctmc build_birth_death(const QueueSpec& spec);

/// Chain over the same labelled states with no transitions, for periods in
/// which both estimated rates are zero.
Ctmc build_frozen_queue(const ValuePartition& partition, double current_value);

inline constexpr std::size_t kDefaultStateCap = 5'000'000;

/// Independent product of up to three birth-death queues. One queue moves at
/// a time; labels follow the first (primary) queue. Queue k is digit k of a
/// mixed-radix state index with queue 0 least significant.
Ctmc compose_network(const std::vector<QueueSpec>& specs,
                     std::size_t state_cap = kDefaultStateCap);

}  // namespace qospred
