#include "qospred/ctmc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qospred/poisson.hpp"

namespace qospred {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
    y[r] = acc;
  }
}

Ctmc Ctmc::build(std::size_t n_states, std::vector<Transition> transitions,
                 std::map<std::string, std::vector<StateIndex>> labels,
                 StateIndex initial_state) {
  if (n_states == 0) throw ModelError("ctmc must have at least one state");
  if (initial_state >= n_states) throw ModelError("initial state index out of range");
  for (const auto& t : transitions) {
    if (t.from >= n_states || t.to >= n_states) throw ModelError("state index out of range");
    if (!(t.rate > 0.0) || !std::isfinite(t.rate)) {
      throw ModelError("transition rate must be positive and finite");
    }
    if (t.from == t.to) throw ModelError("self-loop transitions are not allowed");
  }

  std::sort(transitions.begin(), transitions.end(), [](const Transition& a, const Transition& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });

  Ctmc c;
  c.initial_ = initial_state;
  c.rates_.n = n_states;
  c.rates_.row_ptr.assign(n_states + 1, 0);
  c.rates_.col.reserve(transitions.size());
  c.rates_.val.reserve(transitions.size());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& t = transitions[i];
    if (i > 0 && transitions[i - 1].from == t.from &&
        transitions[i - 1].to == t.to) {
      c.rates_.val.back() += t.rate;
      continue;
    }
    c.rates_.col.push_back(t.to);
    c.rates_.val.push_back(t.rate);
    ++c.rates_.row_ptr[t.from + 1];
  }
  for (std::size_t r = 0; r < n_states; ++r) c.rates_.row_ptr[r + 1] += c.rates_.row_ptr[r];

  c.exit_.assign(n_states, 0.0);
  for (std::size_t r = 0; r < n_states; ++r) {
    for (std::size_t k = c.rates_.row_ptr[r]; k < c.rates_.row_ptr[r + 1]; ++k) {
      c.exit_[r] += c.rates_.val[k];
    }
    if (!std::isfinite(c.exit_[r])) throw ModelError("exit rate is not finite");
  }

  for (auto& [name, states] : labels) {
    std::vector<bool> mask(n_states, false);
    for (StateIndex s : states) {
      if (s >= n_states) throw ModelError("label '" + name + "' refers to unknown state");
      mask[s] = true;
    }
    c.labels_.emplace(name, std::move(mask));
  }
  return c;
}

Ctmc build_ctmc(std::size_t n_states, std::vector<Transition> transitions,
                std::map<std::string, std::vector<StateIndex>> labels,
                StateIndex initial_state) {
  return Ctmc::build(n_states, std::move(transitions), std::move(labels), initial_state);
}

double Ctmc::max_exit_rate() const {
  return exit_.empty() ? 0.0 : *std::max_element(exit_.begin(), exit_.end());
}

bool Ctmc::has_label(const std::string& name) const { return labels_.count(name) != 0; }

const std::vector<bool>& Ctmc::label_mask(const std::string& name) const {
  auto it = labels_.find(name);
  if (it == labels_.end()) throw ModelError("unknown label '" + name + "'");
  return it->second;
}

std::vector<StateIndex> Ctmc::label_states(const std::string& name) const {
  const auto& mask = label_mask(name);
  std::vector<StateIndex> out;
  for (StateIndex s = 0; s < mask.size(); ++s) {
    if (mask[s]) out.push_back(s);
  }
  return out;
}

Ctmc Ctmc::with_initial_state(StateIndex s) const {
  if (s >= num_states()) throw ModelError("initial state index out of range");
  Ctmc c = *this;
  c.initial_ = s;
  return c;
}

Ctmc Ctmc::make_absorbing(const std::vector<bool>& mask) const {
  Ctmc c;
  c.initial_ = initial_;
  c.labels_ = labels_;
  c.exit_ = exit_;
  c.rates_.n = rates_.n;
  c.rates_.row_ptr.assign(rates_.n + 1, 0);
  for (std::size_t r = 0; r < rates_.n; ++r) {
    const bool absorbing = r < mask.size() && mask[r];
    if (!absorbing) {
      for (std::size_t k = rates_.row_ptr[r]; k < rates_.row_ptr[r + 1]; ++k) {
        c.rates_.col.push_back(rates_.col[k]);
        c.rates_.val.push_back(rates_.val[k]);
      }
    } else {
      c.exit_[r] = 0.0;
    }
    c.rates_.row_ptr[r + 1] = c.rates_.col.size();
  }
  return c;
}

void Ctmc::dump(std::ostream& os) const {
  os << "ctmc " << num_states() << '\n';
  for (std::size_t r = 0; r < rates_.n; ++r) {
    for (std::size_t k = rates_.row_ptr[r]; k < rates_.row_ptr[r + 1]; ++k) {
      os << r << ' ' << rates_.col[k] << ' ' << format_double(rates_.val[k]) << '\n';
    }
  }
  for (const auto& [name, mask] : labels_) {
    os << "label " << name;
    for (StateIndex s = 0; s < mask.size(); ++s) {
      if (mask[s]) os << ' ' << s;
    }
    os << '\n';
  }
}

std::string Ctmc::dump() const {
  std::ostringstream os;
  dump(os);
  return os.str();
}

Uniformized uniformize(const Ctmc& ctmc) {
  const auto& q = ctmc.rates();
  if (q.n == 0) throw ModelError("cannot uniformize an empty chain");
  const double max_exit = ctmc.max_exit_rate();
  Uniformized u;
  u.rate = max_exit > 0.0 ? kUniformizationSlack * max_exit : 1.0;

  auto& p = u.jump;
  p.n = q.n;
  p.row_ptr.assign(q.n + 1, 0);
  p.col.reserve(q.nnz() + q.n);
  p.val.reserve(q.nnz() + q.n);
  for (std::size_t r = 0; r < q.n; ++r) {
    // Diagonal kept in column order alongside the off-diagonal entries.
    const double diag = 1.0 - ctmc.exit_rate(r) / u.rate;
    bool placed = false;
    for (std::size_t k = q.row_ptr[r]; k < q.row_ptr[r + 1]; ++k) {
      if (!placed && q.col[k] > r) {
        p.col.push_back(r);
        p.val.push_back(diag);
        placed = true;
      }
      p.col.push_back(q.col[k]);
      p.val.push_back(q.val[k] / u.rate);
    }
    if (!placed) {
      p.col.push_back(r);
      p.val.push_back(diag);
    }
    p.row_ptr[r + 1] = p.col.size();
  }
  return u;
}

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Equal: return "=";
    case Comparator::NotEqual: return "!=";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view t) {
  if (t == "<") return Comparator::Less;
  if (t == "<=" || t == "≤") return Comparator::LessEqual;
  if (t == ">") return Comparator::Greater;
  if (t == ">=" || t == "≥") return Comparator::GreaterEqual;
  if (t == "=" || t == "==") return Comparator::Equal;
  if (t == "!=" || t == "≠") return Comparator::NotEqual;
  return std::nullopt;
}

bool compare(double lhs, Comparator c, double rhs) {
  switch (c) {
    case Comparator::Less: return lhs < rhs;
    case Comparator::LessEqual: return lhs <= rhs;
    case Comparator::Greater: return lhs > rhs;
    case Comparator::GreaterEqual: return lhs >= rhs;
    case Comparator::Equal: return lhs == rhs;
    case Comparator::NotEqual: return lhs != rhs;
  }
  return false;
}

std::vector<double> reach_prob_all(const Ctmc& ctmc, const std::string& goal_label,
                                   double time_bound, const TransientOptions& opts) {
  if (!(time_bound >= 0.0) || !std::isfinite(time_bound)) {
    throw ModelError("time bound must be finite and nonnegative");
  }
  const auto& goal = ctmc.label_mask(goal_label);
  const std::size_t n = ctmc.num_states();

  std::vector<double> x(n);
  for (std::size_t s = 0; s < n; ++s) x[s] = goal[s] ? 1.0 : 0.0;
  if (time_bound == 0.0) return x;

  const Ctmc absorbing = ctmc.make_absorbing(goal);
  if (absorbing.max_exit_rate() == 0.0) return x;
  const Uniformized u = uniformize(absorbing);
  const PoissonWeights pw = poisson_weights(u.rate * time_bound, opts.epsilon);

  // Backward iteration: x_k = P^k 1_goal, result = sum_k w_k x_k. Each entry
  // is P(goal occupied after k jumps of the uniformized chain from state s).
  std::vector<double> result(n, 0.0);
  std::vector<double> next(n);
  for (std::size_t k = 0; k <= pw.right; ++k) {
    if (k >= pw.left) {
      const double wk = pw.weights[k - pw.left];
      for (std::size_t s = 0; s < n; ++s) result[s] += wk * x[s];
    }
    if (k == pw.right) break;
    u.jump.multiply(x, next);
    x.swap(next);
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (goal[s]) {
      result[s] = 1.0;
    } else {
      result[s] = std::clamp(result[s], 0.0, 1.0);
    }
  }
  return result;
}

double transient_reach_prob(const Ctmc& ctmc, const ReachabilityQuery& query,
                            const TransientOptions& opts) {
  if (!(query.time_bound >= 0.0)) throw ModelError("time bound must be nonnegative");
  const auto& goal = ctmc.label_mask(query.goal_label);
  if (query.time_bound == 0.0) return goal[ctmc.initial_state()] ? 1.0 : 0.0;
  return reach_prob_all(ctmc, query.goal_label, query.time_bound, opts)[ctmc.initial_state()];
}

bool check_prob_bound(const Ctmc& ctmc, const ReachabilityQuery& query,
                      const TransientOptions& opts) {
  if (!query.bound) throw ModelError("query has no probability bound");
  if (!(query.bound->threshold >= 0.0 && query.bound->threshold <= 1.0)) {
    throw ModelError("probability threshold must lie in [0, 1]");
  }
  const double p = transient_reach_prob(ctmc, query, opts);
  return compare(p, query.bound->comparator, query.bound->threshold);
}

}  // namespace qospred
