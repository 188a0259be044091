#pragma once

#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qospred/config.hpp"
#include "qospred/estimator.hpp"
#include "qospred/events.hpp"
#include "qospred/qc.hpp"

namespace qospred {

struct PredictionRecord {
  Timestamp timestamp{};
  double value = 0.0;
  std::size_t queue_length = 0;
  StateIndex queue_state = 0;
  double lambda_t = 0.0;
  double mu_t = 0.0;
  double violation_prob = 0.0;
  std::vector<std::pair<std::string, qc::VerdictStatus>> qc_verdicts;
  std::vector<std::string> alerts;  // ids of constraints raising an alert
  double build_time_ms = 0.0;
  double check_time_ms = 0.0;
  bool over_budget = false;  // build + check exceeded the sampling period
  std::string error;
};

struct Alert {
  Timestamp timestamp{};
  std::string qc_id;
  std::string constraint;
  std::vector<qc::Evidence> evidence;
};

struct StepOutput {
  std::optional<PredictionRecord> record;
  std::vector<Event> derived;
  std::vector<Alert> alerts;
};

/// The adaptive prediction loop. Each balance sample drives one period:
/// update the rate estimate, refresh the birth-death snapshot, model-check
/// the predictive indicators and evaluate every constraint.
class Pipeline {
 public:
  Pipeline(Config config, std::vector<qc::NamedQc> constraints);
  ~Pipeline();
  Pipeline(Pipeline&&) noexcept;
  Pipeline& operator=(Pipeline&&) noexcept;

  /// Raw measures are joined into balance samples; balance events are used
  /// directly; other kinds only feed the underproduction query.
  StepOutput push(const Event& e);

  /// One prediction period for a balance sample.
  PredictionRecord step(Timestamp t, double balance);

  const Config& config() const;
  const ValuePartition& partition() const;
  RateParams rates() const;
  /// Number of chain constructions so far.
  std::size_t rebuilds() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// CSV header matching record_csv_row; QC ids become status columns.
std::string record_csv_header(const std::vector<qc::NamedQc>& constraints, bool timing);
std::string record_csv_row(const PredictionRecord& r, bool timing, double alarm_threshold);

struct PipelineSummary {
  std::size_t events = 0;
  std::size_t records = 0;
  std::size_t alerts = 0;
  std::size_t errors = 0;
};

/// Reads wire-format events from `in` and writes one CSV row per period to
/// `csv`. Derived events go to `derived` when given. Parse errors abort
/// with an exception; checker failures are recorded per period.
PipelineSummary run_pipeline(const Config& config, const std::vector<qc::NamedQc>& constraints,
                             std::istream& in, std::ostream& csv, std::ostream* derived = nullptr);

// ---------------------------------------------------------------------------
// Benchmark and plot data
// ---------------------------------------------------------------------------

struct BenchRow {
  std::size_t length = 0;
  std::size_t states = 0;
  std::size_t transitions = 0;
  double build_s = 0.0;
  double check_s = 0.0;
  double total_s = 0.0;
  double probability = 0.0;
};

struct BenchOptions {
  double rate = 1.0;  // lambda = mu for every queue, 1/minute
  double horizon_min = 30.0;
  ValuePartition partition;  // n_intervals replaced by each length
  std::size_t state_cap = kDefaultStateCap;
  TransientOptions transient;
};

/// Three-queue product network per length; checks P=?[F<=T violState] from
/// the balance point of every queue.
BenchRow bench_one(std::size_t length, const BenchOptions& opts = {});
std::vector<BenchRow> bench(const std::vector<std::size_t>& lengths, const BenchOptions& opts = {});
std::string bench_csv(const std::vector<BenchRow>& rows);

/// Violation probability within the horizon from every queue state for a
/// fixed rate snapshot.
std::vector<double> violation_curve(const ValuePartition& partition, const BirthDeathRates& rates,
                                    double horizon_min, const TransientOptions& opts = {});

struct PlotRow {
  std::string series;
  StateIndex state;
  double violation_prob;
  double lambda_t;
  double mu_t;
};

/// Curve for the rate snapshot of the last record.
std::vector<PlotRow> plot_data(const std::vector<PredictionRecord>& records,
                               const ValuePartition& partition, double horizon_min,
                               const TransientOptions& opts = {}, const std::string& series = "run");
std::string plot_csv(const std::vector<PlotRow>& rows);

}  // namespace qospred
