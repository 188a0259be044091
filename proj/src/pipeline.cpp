#include "qospred/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <charconv>
#include <sstream>

#include "qospred/log.hpp"

namespace qospred {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Reach-probability vectors of one chain, computed once per (label,
/// horizon) and read at the current queue state.
class SnapshotChecker final : public qc::Checker {
 public:
  SnapshotChecker(const Ctmc& chain, StateIndex state, const TransientOptions& opts,
                  std::map<std::pair<std::string, double>, std::vector<double>>& cache)
      : chain_(chain), state_(state), opts_(opts), cache_(cache) {}

  double reach_probability(const qc::CslFormula& f) const override {
    return probability(f.goal_label, f.time_bound);
  }

  double probability(const std::string& label, double horizon) const {
    auto key = std::make_pair(label, horizon);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, reach_prob_all(chain_, label, horizon, opts_)).first;
    }
    return it->second[state_];
  }

 private:
  const Ctmc& chain_;
  StateIndex state_;
  const TransientOptions& opts_;
  std::map<std::pair<std::string, double>, std::vector<double>>& cache_;
};

}  // namespace

struct Pipeline::Impl {
  Config cfg;
  std::vector<qc::NamedQc> constraints;
  std::vector<qc::QcMonitor> monitors;
  ValuePartition partition;
  RateEstimator estimator;
  BalanceJoiner joiner;
  std::optional<UnderproductionQuery> underproduction;

  std::optional<Ctmc> chain;
  BirthDeathRates chain_rates{};
  std::map<std::pair<std::string, double>, std::vector<double>> cache;
  std::size_t rebuilds = 0;

  Impl(Config c, std::vector<qc::NamedQc> qcs)
      : cfg(std::move(c)),
        constraints(std::move(qcs)),
        partition(cfg.partition),
        estimator(cfg.alpha, cfg.mode, cfg.window_min),
        joiner(cfg.producer, cfg.consumer, cfg.sample_period_min) {
    for (const auto& q : constraints) monitors.emplace_back(q.id, q.qc, cfg.sample_period_min);
    if (cfg.underproduction) {
      underproduction.emplace(cfg.underproduction->source, cfg.underproduction->window_min,
                              cfg.underproduction->threshold_mw);
    }
  }

  /// Rebuilds the chain when the partition changed or a rate moved by more
  /// than 1e-9. Returns true when a new chain was built.
  bool refresh(const BirthDeathRates& r, bool resized) {
    const bool same = chain && !resized && std::abs(r.lambda - chain_rates.lambda) <= 1e-9 &&
                      std::abs(r.mu - chain_rates.mu) <= 1e-9;
    if (same) return false;
    // Initial state is irrelevant here: probabilities are read per state.
    if (r.lambda == 0.0 && r.mu == 0.0) {
      chain = build_frozen_queue(partition, partition.min_b);
    } else {
      QueueSpec spec{cfg.kpi_name, partition, r, partition.min_b};
      chain = build_birth_death(spec);
    }
    chain_rates = r;
    cache.clear();
    ++rebuilds;
    return true;
  }

  PredictionRecord step(Timestamp t, double value) {
    PredictionRecord rec;
    rec.timestamp = t;
    rec.value = value;

    // Estimator update.
    try {
      estimator.observe(to_minutes(t), value, partition.width());
    } catch (const EstimatorError& e) {
      rec.error = e.what();
      log::warn(format_timestamp(t) + ": " + rec.error);
    }

    // Adapt the queue length.
    bool resized = false;
    StateIndex state = value_to_state(partition, value);
    if (cfg.resize_enabled) {
      const auto r = maybe_resize(partition, state, cfg.resize);
      if (r.changed) {
        const double old_width = partition.width();
        partition = r.partition;
        estimator.rescale(old_width, partition.width());
        state = value_to_state(partition, value);
        resized = true;
        log::info(format_timestamp(t) + ": queue length now " +
                  std::to_string(partition.n_intervals));
      }
    }

    const RateParams snapshot = estimator.snapshot();
    rec.queue_length = partition.n_intervals;
    rec.queue_state = state;
    rec.lambda_t = snapshot.lambda_t;
    rec.mu_t = snapshot.mu_t;

    // Model snapshot.
    const auto build_start = Clock::now();
    try {
      refresh(snapshot.rates(), resized);
    } catch (const std::exception& e) {
      rec.error = e.what();
      chain.reset();
    }
    rec.build_time_ms = ms_since(build_start);

    // Model checking and constraint evaluation.
    const auto check_start = Clock::now();
    if (chain) {
      SnapshotChecker checker(*chain, state, cfg.transient, cache);
      try {
        rec.violation_prob = checker.probability(kViolationLabel, cfg.horizon_min);
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      const qc::KpiValues kpis{{cfg.kpi_name, value}};
      for (auto& m : monitors) {
        const auto v = m.step(t, kpis, checker);
        rec.qc_verdicts.emplace_back(m.id(), v.status);
        if (v.status == qc::VerdictStatus::Error) {
          log::warn(format_timestamp(t) + ": " + m.id() + ": " + v.diagnostic);
        }
        if (v.alert) rec.alerts.push_back(m.id());
      }
    } else {
      for (const auto& m : monitors) rec.qc_verdicts.emplace_back(m.id(), qc::VerdictStatus::Error);
      log::warn(format_timestamp(t) + ": no model snapshot: " + rec.error);
    }
    rec.check_time_ms = ms_since(check_start);

    const double period_ms = cfg.sample_period_min * 60000.0;
    if (rec.build_time_ms + rec.check_time_ms > period_ms) {
      rec.over_budget = true;
      log::warn(format_timestamp(t) + ": prediction took " +
                num(rec.build_time_ms + rec.check_time_ms) +
                " ms, longer than the sampling period");
    }
    return rec;
  }
};

Pipeline::Pipeline(Config config, std::vector<qc::NamedQc> constraints) {
  config.validate();
  impl_ = std::make_unique<Impl>(std::move(config), std::move(constraints));
}
Pipeline::~Pipeline() = default;
Pipeline::Pipeline(Pipeline&&) noexcept = default;
Pipeline& Pipeline::operator=(Pipeline&&) noexcept = default;

const Config& Pipeline::config() const { return impl_->cfg; }
const ValuePartition& Pipeline::partition() const { return impl_->partition; }
RateParams Pipeline::rates() const { return impl_->estimator.snapshot(); }
std::size_t Pipeline::rebuilds() const { return impl_->rebuilds; }

PredictionRecord Pipeline::step(Timestamp t, double balance) { return impl_->step(t, balance); }

StepOutput Pipeline::push(const Event& e) {
  StepOutput out;
  auto& im = *impl_;
  if (im.underproduction) {
    if (auto msg = im.underproduction->push(e)) {
      log::warn(format_timestamp(msg->timestamp) + ": " + msg->source + " has gone underproduction");
      out.derived.push_back(std::move(*msg));
    }
  }

  std::optional<Event> balance;
  if (e.kind == EventKind::BalanceIndicator) {
    balance = e;
  } else if (e.kind == EventKind::SmartMeterMeasure) {
    balance = im.joiner.push(e);
    if (balance) out.derived.push_back(*balance);
  }
  if (!balance) return out;

  out.derived.push_back(classify_range(*balance, im.partition));
  PredictionRecord rec = step(balance->timestamp, balance->measure);
  for (const auto& id : rec.alerts) {
    Alert a;
    a.timestamp = rec.timestamp;
    a.qc_id = id;
    for (const auto& q : im.constraints) {
      if (q.id == id) a.constraint = qc::print(q.qc);
    }
    log::warn(format_timestamp(a.timestamp) + ": ALERT " + id + " violated: " + a.constraint +
              " (violation probability " + num(rec.violation_prob) + ")");
    out.alerts.push_back(std::move(a));
  }
  out.record = std::move(rec);
  return out;
}

std::string record_csv_header(const std::vector<qc::NamedQc>& constraints, bool timing) {
  std::string h = "timestamp,value,queue_length,queue_state,lambda_t,mu_t,violation_prob,alarm";
  for (const auto& q : constraints) h += "," + q.id;
  h += ",alerts,error";
  if (timing) h += ",build_time_ms,check_time_ms,over_budget";
  return h;
}

std::string record_csv_row(const PredictionRecord& r, bool timing, double alarm_threshold) {
  std::string row = format_timestamp(r.timestamp) + "," + num(r.value) + "," +
                    std::to_string(r.queue_length) + "," + std::to_string(r.queue_state) + "," +
                    num(r.lambda_t) + "," + num(r.mu_t) + "," + num(r.violation_prob) + "," +
                    (r.violation_prob > alarm_threshold ? "1" : "0");
  for (const auto& [id, status] : r.qc_verdicts) {
    row += ",";
    row += qc::to_string(status);
  }
  row += ",";
  for (std::size_t i = 0; i < r.alerts.size(); ++i) {
    if (i) row += ";";
    row += r.alerts[i];
  }
  row += ",";
  for (char c : r.error) row += (c == ',' || c == '\n') ? ' ' : c;
  if (timing) {
    row += "," + num(r.build_time_ms) + "," + num(r.check_time_ms) + "," +
           (r.over_budget ? "1" : "0");
  }
  return row;
}

PipelineSummary run_pipeline(const Config& config, const std::vector<qc::NamedQc>& constraints,
                             std::istream& in, std::ostream& csv, std::ostream* derived) {
  Pipeline pipeline(config, constraints);
  EventIngestor ingestor(config.order_policy);
  PipelineSummary summary;
  csv << record_csv_header(constraints, config.timing) << '\n';

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::optional<Event> e;
    try {
      e = ingestor.ingest(line);
    } catch (const EventParseError& err) {
      throw EventParseError("line " + std::to_string(line_no) + ": " + err.reason, err.offset);
    } catch (const OrderingError& err) {
      throw OrderingError("line " + std::to_string(line_no) + ": " + err.what());
    }
    if (!e) continue;
    ++summary.events;
    StepOutput out = pipeline.push(*e);
    if (derived) {
      for (const auto& d : out.derived) *derived << format_event(d) << '\n';
    }
    summary.alerts += out.alerts.size();
    if (out.record) {
      ++summary.records;
      if (!out.record->error.empty()) ++summary.errors;
      csv << record_csv_row(*out.record, config.timing, config.alarm_threshold) << '\n';
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------

BenchRow bench_one(std::size_t length, const BenchOptions& opts) {
  if (length == 0) throw ModelError("queue length must be positive");
  BenchRow row;
  row.length = length;
  ValuePartition p = opts.partition;
  p.n_intervals = length;
  const double balance_point = 0.5 * (p.min_b + p.max_b);

  const auto total_start = Clock::now();
  auto start = total_start;
  std::vector<QueueSpec> specs;
  for (const char* name : {"ED", "EP", "EC"}) {
    specs.push_back({name, p, {opts.rate, opts.rate}, balance_point});
  }
  const Ctmc chain = compose_network(specs, opts.state_cap);
  row.build_s = ms_since(start) / 1000.0;
  row.states = chain.num_states();
  row.transitions = chain.num_transitions();

  start = Clock::now();
  row.probability = transient_reach_prob(chain, {kViolationLabel, opts.horizon_min, std::nullopt},
                                         opts.transient);
  row.check_s = ms_since(start) / 1000.0;
  row.total_s = ms_since(total_start) / 1000.0;
  return row;
}

std::vector<BenchRow> bench(const std::vector<std::size_t>& lengths, const BenchOptions& opts) {
  std::vector<BenchRow> rows;
  for (std::size_t len : lengths) rows.push_back(bench_one(len, opts));
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "queue_length,states,transitions,build_time_s,check_time_s,total_time_s,probability\n";
  for (const auto& r : rows) {
    out += std::to_string(r.length) + "," + std::to_string(r.states) + "," +
           std::to_string(r.transitions) + "," + num(r.build_s) + "," + num(r.check_s) + "," +
           num(r.total_s) + "," + num(r.probability) + "\n";
  }
  return out;
}

std::vector<double> violation_curve(const ValuePartition& partition, const BirthDeathRates& rates,
                                    double horizon_min, const TransientOptions& opts) {
  const Ctmc chain = (rates.lambda == 0.0 && rates.mu == 0.0)
                         ? build_frozen_queue(partition, partition.min_b)
                         : build_birth_death({"balance", partition, rates, partition.min_b});
  return reach_prob_all(chain, kViolationLabel, horizon_min, opts);
}

std::vector<PlotRow> plot_data(const std::vector<PredictionRecord>& records,
                               const ValuePartition& partition, double horizon_min,
                               const TransientOptions& opts, const std::string& series) {
  if (records.empty()) throw std::invalid_argument("plot_data needs at least one record");
  const auto& last = records.back();
  ValuePartition p = partition;
  if (last.queue_length > 0) p.n_intervals = last.queue_length;
  const BirthDeathRates r{last.lambda_t, last.mu_t};
  const auto curve = violation_curve(p, r, horizon_min, opts);
  std::vector<PlotRow> rows;
  for (StateIndex s = 0; s < curve.size(); ++s) rows.push_back({series, s, curve[s], r.lambda, r.mu});
  return rows;
}

std::string plot_csv(const std::vector<PlotRow>& rows) {
  std::string out = "scenario,state,violation_prob,lambda_t,mu_t\n";
  for (const auto& r : rows) {
    out += r.series + "," + std::to_string(r.state) + "," + num(r.violation_prob) + "," +
           num(r.lambda_t) + "," + num(r.mu_t) + "\n";
  }
  return out;
}

}  // namespace qospred
