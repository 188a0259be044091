#include "qospred/events.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "qospred/log.hpp"

namespace qospred {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::SmartMeterMeasure: return "measure";
    case EventKind::BalanceIndicator: return "balance";
    case EventKind::Range: return "range";
    case EventKind::CriticalValueMsg: return "critical";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view t) {
  if (t == "measure") return EventKind::SmartMeterMeasure;
  if (t == "balance") return EventKind::BalanceIndicator;
  if (t == "range") return EventKind::Range;
  if (t == "critical") return EventKind::CriticalValueMsg;
  return std::nullopt;
}

Event parse_event(std::string_view line) {
  std::vector<std::pair<std::string_view, std::size_t>> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start), start);
      break;
    }
    fields.emplace_back(line.substr(start, comma - start), start);
    start = comma + 1;
  }
  if (fields.size() < 4 || fields.size() > 5) {
    throw EventParseError("expected 4 or 5 comma-separated fields, got " +
                              std::to_string(fields.size()),
                          fields.size() < 4 ? line.size() : fields[5].second);
  }

  Event e;
  std::size_t bad = 0;
  const auto ts = trim(fields[0].first);
  const std::size_t lead = fields[0].first.find_first_not_of(" \t");
  const std::size_t ts_off = lead == std::string_view::npos ? 0 : lead;
  auto parsed = parse_timestamp(ts, &bad);
  if (!parsed) throw EventParseError("malformed timestamp", ts_off + bad);
  e.timestamp = *parsed;

  e.source = std::string(trim(fields[1].first));
  if (e.source.empty()) throw EventParseError("empty source", fields[1].second);

  auto kind = parse_event_kind(trim(fields[2].first));
  if (!kind) throw EventParseError("unknown event kind", fields[2].second);
  e.kind = *kind;

  const auto m = trim(fields[3].first);
  const char* first = m.data();
  const char* last = m.data() + m.size();
  if (!m.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, e.measure);
  if (m.empty() || ec != std::errc{} || ptr != last || !std::isfinite(e.measure)) {
    throw EventParseError("malformed measure", fields[3].second);
  }

  if (fields.size() == 5) {
    e.extra = std::string(trim(fields[4].first));
  }
  if (e.kind == EventKind::Range && (!e.extra || e.extra->empty())) {
    throw EventParseError("range event requires a range name", line.size());
  }
  return e;
}

std::string format_event(const Event& e) {
  std::string out = format_timestamp(e.timestamp);
  out += ',';
  out += e.source;
  out += ',';
  out += to_string(e.kind);
  out += ',';
  out += format_number(e.measure);
  if (e.extra) {
    out += ',';
    out += *e.extra;
  }
  return out;
}

std::optional<Event> EventIngestor::ingest(std::string_view line) {
  const auto t = trim(line);
  if (t.empty() || t.front() == '#') return std::nullopt;
  Event e = parse_event(line);
  auto it = last_seen_.find(e.source);
  if (it != last_seen_.end() && e.timestamp < it->second) {
    const std::string msg = "out-of-order timestamp " + format_timestamp(e.timestamp) +
                            " for source " + e.source + " (last " +
                            format_timestamp(it->second) + ")";
    if (policy_ == OrderPolicy::Reject) throw OrderingError(msg);
    log::warn(msg + "; dropped");
    ++dropped_;
    return std::nullopt;
  }
  last_seen_[e.source] = e.timestamp;
  return e;
}

Event derive_balance(const Event& ep, const Event& ec, std::string_view source) {
  Event out;
  out.timestamp = std::max(ep.timestamp, ec.timestamp);
  out.source = std::string(source);
  out.kind = EventKind::BalanceIndicator;
  out.measure = ep.measure - ec.measure;
  return out;
}

BalanceJoiner::BalanceJoiner(std::string producer, std::string consumer, double period_min,
                             std::string output_source)
    : producer_(std::move(producer)),
      consumer_(std::move(consumer)),
      output_source_(std::move(output_source)),
      period_ms_(std::llround(period_min * 60000.0)) {
  if (period_ms_ <= 0) throw std::invalid_argument("join period must be positive");
}

std::optional<Event> BalanceJoiner::push(const Event& e) {
  if (e.kind != EventKind::SmartMeterMeasure) return std::nullopt;
  const bool is_ep = e.source == producer_;
  const bool is_ec = e.source == consumer_;
  if (!is_ep && !is_ec) return std::nullopt;

  const long long ms = e.timestamp.time_since_epoch().count();
  const long long bucket = ms >= 0 ? ms / period_ms_ : -((-ms + period_ms_ - 1) / period_ms_);
  if (bucket_ && bucket < *bucket_) {
    log::warn("late measure from " + e.source + " at " + format_timestamp(e.timestamp) +
              " ignored by balance join");
    return std::nullopt;
  }
  if (!bucket_ || bucket > *bucket_) {
    if (bucket_ && !emitted_ && (ep_ || ec_)) {
      log::info("no counterpart for " + std::string(ep_ ? producer_ : consumer_) +
                " measure at " + format_timestamp((ep_ ? ep_ : ec_)->timestamp) +
                "; balance not derived");
    }
    bucket_ = bucket;
    ep_.reset();
    ec_.reset();
    emitted_ = false;
  }
  if (emitted_) return std::nullopt;
  (is_ep ? ep_ : ec_) = e;
  if (ep_ && ec_) {
    emitted_ = true;
    return derive_balance(*ep_, *ec_, output_source_);
  }
  return std::nullopt;
}

Event classify_range(const Event& balance, const ValuePartition& partition) {
  Event out;
  out.timestamp = balance.timestamp;
  out.source = balance.source;
  out.kind = EventKind::Range;
  out.measure = balance.measure;
  out.extra = "range_" + std::to_string(value_to_state(partition, balance.measure));
  return out;
}

UnderproductionQuery::UnderproductionQuery(std::string source, double duration_min,
                                           double threshold)
    : source_(std::move(source)),
      duration_(std::llround(duration_min * 60000.0)),
      threshold_(threshold) {
  if (duration_.count() <= 0) throw std::invalid_argument("window duration must be positive");
}

std::optional<Event> UnderproductionQuery::push(const Event& e) {
  if (e.kind != EventKind::SmartMeterMeasure || e.source != source_) return std::nullopt;
  if (!first_seen_) first_seen_ = e.timestamp;
  window_.emplace_back(e.timestamp, e.measure);
  const Timestamp lower = e.timestamp - duration_;
  while (!window_.empty() && window_.front().first < lower) window_.pop_front();

  if (e.measure >= threshold_) {
    in_episode_ = false;
    return std::nullopt;
  }
  if (in_episode_ || *first_seen_ > lower) return std::nullopt;
  for (const auto& [ts, m] : window_) {
    if (m >= threshold_) return std::nullopt;
  }
  in_episode_ = true;
  Event out;
  out.timestamp = e.timestamp;
  out.source = source_;
  out.kind = EventKind::CriticalValueMsg;
  out.measure = e.measure;
  out.extra = "underproduction";
  return out;
}

}  // namespace qospred
