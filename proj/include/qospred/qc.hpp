#pragma once

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qospred/ctmc.hpp"
#include "qospred/timestamp.hpp"

namespace qospred::qc {

// ---------------------------------------------------------------------------
// AST
//
//   qc       := expr | expr ('along' | 'within') DURATION
//   expr     := term CMP term
//   term     := IDENT | NUMBER | 'true' | 'false' | 'eval' '(' csl ')'
//   csl      := 'P' ('=?' | CMP PROB) '[' 'F' '<=' NUMBER STRING ']'
//   DURATION := NUMBER ('m' | 'h')
// ---------------------------------------------------------------------------

struct CslFormula {
  std::optional<ProbBound> bound;  // empty: P=?
  double time_bound = 0.0;         // minutes
  std::string goal_label;

  bool is_query() const { return !bound; }
  bool operator==(const CslFormula&) const = default;
};

struct KpiRef {
  std::string name;
  bool operator==(const KpiRef&) const = default;
};

struct Const {
  std::variant<double, bool> value;
  bool operator==(const Const&) const = default;
};

struct Eval {
  CslFormula formula;
  bool operator==(const Eval&) const = default;
};

using Term = std::variant<KpiRef, Const, Eval>;

/// True when the term evaluates to a boolean rather than a number.
bool is_boolean(const Term& t);

struct Compare {
  Term lhs;
  Comparator op = Comparator::Equal;
  Term rhs;
  bool operator==(const Compare&) const = default;
};

enum class TemporalOp { None, Along, Within };

struct Qc {
  Compare body;
  TemporalOp op = TemporalOp::None;
  double duration_min = 0.0;  // > 0 when op != None
  bool operator==(const Qc&) const = default;
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, std::size_t column, const std::string& msg);
  std::size_t line;
  std::size_t column;
};

/// Parses a single constraint. `line` is used for diagnostics only.
Qc parse_qc(std::string_view text, std::size_t line = 1);

std::string print(const CslFormula& f);
std::string print(const Term& t);
std::string print(const Qc& qc);

struct NamedQc {
  std::string id;
  std::size_t line = 0;
  Qc qc;
};

/// One constraint per line; blank lines and `#` comments are skipped.
/// Constraints are named qc1, qc2, ... in file order.
std::vector<NamedQc> parse_qc_file(std::string_view text);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Resolves eval() leaves against a model snapshot.
class Checker {
 public:
  virtual ~Checker() = default;
  /// P(reach goal_label within time_bound) from the snapshot's current state.
  virtual double reach_probability(const CslFormula& f) const = 0;
};

class CtmcChecker final : public Checker {
 public:
  explicit CtmcChecker(const Ctmc& model, TransientOptions opts = {})
      : model_(model), opts_(opts) {}
  double reach_probability(const CslFormula& f) const override;

 private:
  const Ctmc& model_;
  TransientOptions opts_;
};

using CslValue = std::variant<double, bool>;

/// Query form yields the probability, bound form yields the comparison.
CslValue eval_csl(const CslFormula& f, const Ctmc& model, const TransientOptions& opts = {});
CslValue eval_csl(const CslFormula& f, const Checker& checker);

enum class VerdictStatus { Satisfied, Violated, Pending, Error };

std::string_view to_string(VerdictStatus s);

struct Evidence {
  std::string term;  // printed eval() term
  double value;      // probability, or 0/1 for bound form
};

struct WindowDecision {
  Timestamp window_start;
  VerdictStatus status;
};

struct QcVerdict {
  VerdictStatus status = VerdictStatus::Pending;
  Timestamp timestamp{};
  std::vector<Evidence> evidence;
  /// Windows decided at this instant, oldest first.
  std::vector<WindowDecision> decided;
  /// First Violated verdict of an episode.
  bool alert = false;
  std::string diagnostic;
};

using KpiValues = std::map<std::string, double, std::less<>>;

/// Runtime monitor for one constraint.
///
/// Temporal windows are sliding: each evaluation instant a opens the window
/// [a, a + T), which is decided by the evaluations falling inside it. An
/// along window fails on its first false instant and holds if it closes
/// all-true; a within window holds on its first true instant and fails if it
/// closes without one. A window closes when an instant at or beyond its end
/// arrives, or, when the sampling period is known, as soon as the next
/// instant could no longer fall inside it.
///
/// Alerts are deduplicated per episode: only the first Violated decision
/// raises `alert`, and a Satisfied decision ends the episode.
class QcMonitor {
 public:
  QcMonitor(std::string id, Qc qc, std::optional<double> period_min = std::nullopt);

  QcVerdict step(Timestamp t, const KpiValues& kpis, const Checker& checker);

  const std::string& id() const { return id_; }
  const Qc& qc() const { return qc_; }
  bool in_episode() const { return in_episode_; }

 private:
  struct Window {
    Timestamp start;
    bool decided = false;
  };

  std::string id_;
  Qc qc_;
  std::optional<std::chrono::milliseconds> period_;
  std::chrono::milliseconds duration_{0};
  std::deque<Window> windows_;
  std::optional<Timestamp> last_;
  bool in_episode_ = false;
};

/// Evaluates the body at one instant. Throws std::runtime_error for missing
/// KPIs or checker failures.
bool evaluate(const Compare& body, const KpiValues& kpis, const Checker& checker,
              std::vector<Evidence>* evidence = nullptr);

}  // namespace qospred::qc
