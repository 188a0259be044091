#pragma once

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qospred/queue_model.hpp"
#include "qospred/timestamp.hpp"

namespace qospred {

enum class EventKind { SmartMeterMeasure, BalanceIndicator, Range, CriticalValueMsg };

/// Wire tokens: measure, balance, range, critical.
std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view token);

struct Event {
  Timestamp timestamp;
  std::string source;
  EventKind kind = EventKind::SmartMeterMeasure;
  double measure = 0.0;  // MW; signed MW for the balance indicator
  std::optional<std::string> extra;

  bool operator==(const Event&) const = default;
};

struct EventParseError : std::runtime_error {
  EventParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), reason(msg), offset(offset) {}
  std::string reason;
  std::size_t offset;
};

/// Parses one `timestamp,source,kind,measure[,extra]` record.
Event parse_event(std::string_view line);

/// Inverse of parse_event; measures use the shortest round-trip form.
std::string format_event(const Event& e);

enum class OrderPolicy { Reject, WarnAndDrop };

struct OrderingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Line-oriented ingestion with the per-source ordering contract.
class EventIngestor {
 public:
  explicit EventIngestor(OrderPolicy policy = OrderPolicy::Reject) : policy_(policy) {}

  /// Returns nullopt for blank lines, `#` comments and dropped records.
  /// Throws EventParseError, or OrderingError under OrderPolicy::Reject.
  std::optional<Event> ingest(std::string_view line);

  std::size_t dropped() const { return dropped_; }

 private:
  OrderPolicy policy_;
  std::map<std::string, Timestamp, std::less<>> last_seen_;
  std::size_t dropped_ = 0;
};

/// BalanceIndicator with index = EP.measure - EC.measure.
Event derive_balance(const Event& ep, const Event& ec, std::string_view source = "ED");

/// Pairs producer and consumer measures falling in the same sampling bucket.
class BalanceJoiner {
 public:
  BalanceJoiner(std::string producer, std::string consumer, double period_min,
                std::string output_source = "ED");

  /// Feeds any event; returns a balance indicator once both sides of a
  /// bucket are present. Incomplete buckets are dropped with a log line.
  std::optional<Event> push(const Event& e);

 private:
  std::string producer_;
  std::string consumer_;
  std::string output_source_;
  long long period_ms_;
  std::optional<long long> bucket_;
  std::optional<Event> ep_;
  std::optional<Event> ec_;
  bool emitted_ = false;
};

/// Range event naming the queue interval `range_<i>` the index falls in.
Event classify_range(const Event& balance, const ValuePartition& partition);

/// Sustained-below detector over a trailing time window for one source.
/// Fires when the window spans its full duration and every measure in it is
/// below the threshold; fires once per episode.
class UnderproductionQuery {
 public:
  UnderproductionQuery(std::string source, double duration_min, double threshold);

  std::optional<Event> push(const Event& e);

 private:
  std::string source_;
  std::chrono::milliseconds duration_;
  double threshold_;
  std::deque<std::pair<Timestamp, double>> window_;
  std::optional<Timestamp> first_seen_;
  bool in_episode_ = false;
};

}  // namespace qospred
