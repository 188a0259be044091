#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qospred {

using StateIndex = std::size_t;

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Transition {
  StateIndex from;
  StateIndex to;
  double rate;  // 1/minute
};

/// Compressed-row sparse matrix; rows index the source state.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  // size n + 1
  std::vector<StateIndex> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  /// y = A x
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
};

/// Finite continuous-time Markov chain with named state labels.
///
/// Instances are immutable after construction and safe to share between
/// threads.
class Ctmc {
 public:
  /// Validates and builds a chain. Duplicate (from, to) entries are summed.
  static Ctmc build(std::size_t n_states, std::vector<Transition> transitions,
                    std::map<std::string, std::vector<StateIndex>> labels,
                    StateIndex initial_state);

  std::size_t num_states() const { return rates_.n; }
  std::size_t num_transitions() const { return rates_.nnz(); }
  StateIndex initial_state() const { return initial_; }
  const CsrMatrix& rates() const { return rates_; }
  double exit_rate(StateIndex s) const { return exit_[s]; }
  double max_exit_rate() const;

  bool has_label(const std::string& name) const;
  /// Membership mask of a label; throws ModelError for unknown labels.
  const std::vector<bool>& label_mask(const std::string& name) const;
  std::vector<StateIndex> label_states(const std::string& name) const;
  const std::map<std::string, std::vector<bool>>& labels() const { return labels_; }

  /// Same chain with a different starting state.
  Ctmc with_initial_state(StateIndex s) const;
  /// Same chain with every outgoing transition of masked states removed.
  Ctmc make_absorbing(const std::vector<bool>& mask) const;

  /// Text dump: `ctmc <n>`, `<from> <to> <rate>` sorted by (from, to),
  /// then `label <name> <idx...>` in name order.
  void dump(std::ostream& os) const;
  std::string dump() const;

 private:
  Ctmc() = default;
  CsrMatrix rates_;
  std::vector<double> exit_;
  std::map<std::string, std::vector<bool>> labels_;
  StateIndex initial_ = 0;
};

Ctmc build_ctmc(std::size_t n_states, std::vector<Transition> transitions,
                std::map<std::string, std::vector<StateIndex>> labels,
                StateIndex initial_state);

struct Uniformized {
  double rate;      // q
  CsrMatrix jump;   // P = I + Q/q, row-stochastic
};

/// Uniformization constant is kUniformizationSlack times the maximum exit
/// rate; a chain with no transitions gets q = 1 and P = I.
inline constexpr double kUniformizationSlack = 1.02;

Uniformized uniformize(const Ctmc& ctmc);

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual };

std::string_view to_string(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view token);
bool compare(double lhs, Comparator c, double rhs);

struct ProbBound {
  Comparator comparator;
  double threshold;
  bool operator==(const ProbBound&) const = default;
};

struct ReachabilityQuery {
  std::string goal_label;
  double time_bound = 0.0;         // minutes
  std::optional<ProbBound> bound;  // empty: quantitative P=?
};

struct TransientOptions {
  /// Poisson tail mass neglected on each side of the truncation window.
  double epsilon = 1e-10;
};

/// P(reach goal within T) from every state. Goal states are made absorbing
/// before uniformization.
std::vector<double> reach_prob_all(const Ctmc& ctmc, const std::string& goal_label,
                                   double time_bound, const TransientOptions& opts = {});

/// P(reach goal within T) from the chain's initial state.
double transient_reach_prob(const Ctmc& ctmc, const ReachabilityQuery& query,
                            const TransientOptions& opts = {});

/// Evaluates a bounded query; throws ModelError when the query has no bound.
bool check_prob_bound(const Ctmc& ctmc, const ReachabilityQuery& query,
                      const TransientOptions& opts = {});

}  // namespace qospred
