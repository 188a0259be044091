#include <cmath>

#include "qospred/qc.hpp"

namespace qospred::qc {

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Satisfied: return "satisfied";
    case VerdictStatus::Violated: return "violated";
    case VerdictStatus::Pending: return "pending";
    case VerdictStatus::Error: return "error";
  }
  return "?";
}

double CtmcChecker::reach_probability(const CslFormula& f) const {
  return transient_reach_prob(model_, {f.goal_label, f.time_bound, f.bound}, opts_);
}

CslValue eval_csl(const CslFormula& f, const Checker& checker) {
  const double p = checker.reach_probability(f);
  if (f.is_query()) return p;
  return compare(p, f.bound->comparator, f.bound->threshold);
}

CslValue eval_csl(const CslFormula& f, const Ctmc& model, const TransientOptions& opts) {
  return eval_csl(f, CtmcChecker(model, opts));
}

namespace {

CslValue resolve(const Term& t, const KpiValues& kpis, const Checker& checker,
                 std::vector<Evidence>* evidence) {
  if (const auto* k = std::get_if<KpiRef>(&t)) {
    auto it = kpis.find(k->name);
    if (it == kpis.end()) throw std::runtime_error("missing KPI value '" + k->name + "'");
    return it->second;
  }
  if (const auto* c = std::get_if<Const>(&t)) {
    if (const bool* b = std::get_if<bool>(&c->value)) return *b;
    return std::get<double>(c->value);
  }
  const auto& e = std::get<Eval>(t);
  CslValue v = eval_csl(e.formula, checker);
  if (evidence) {
    const double num = std::holds_alternative<bool>(v) ? (std::get<bool>(v) ? 1.0 : 0.0)
                                                       : std::get<double>(v);
    evidence->push_back({print(t), num});
  }
  return v;
}

}  // namespace

bool evaluate(const Compare& body, const KpiValues& kpis, const Checker& checker,
              std::vector<Evidence>* evidence) {
  const CslValue l = resolve(body.lhs, kpis, checker, evidence);
  const CslValue r = resolve(body.rhs, kpis, checker, evidence);
  if (l.index() != r.index()) throw std::runtime_error("cannot compare a boolean with a number");
  if (std::holds_alternative<bool>(l)) {
    const bool eq = std::get<bool>(l) == std::get<bool>(r);
    if (body.op == Comparator::Equal) return eq;
    if (body.op == Comparator::NotEqual) return !eq;
    throw std::runtime_error("booleans only support = and !=");
  }
  return compare(std::get<double>(l), body.op, std::get<double>(r));
}

QcMonitor::QcMonitor(std::string id, Qc qc, std::optional<double> period_min)
    : id_(std::move(id)), qc_(std::move(qc)) {
  if (qc_.op != TemporalOp::None) {
    if (!(qc_.duration_min > 0.0)) throw std::invalid_argument("window duration must be positive");
    duration_ = std::chrono::milliseconds{std::llround(qc_.duration_min * 60000.0)};
  }
  if (period_min) {
    if (!(*period_min > 0.0)) throw std::invalid_argument("sampling period must be positive");
    period_ = std::chrono::milliseconds{std::llround(*period_min * 60000.0)};
  }
}

QcVerdict QcMonitor::step(Timestamp t, const KpiValues& kpis, const Checker& checker) {
  QcVerdict v;
  v.timestamp = t;
  if (last_ && t <= *last_) {
    v.status = VerdictStatus::Error;
    v.diagnostic = "evaluation instants must be strictly increasing";
    return v;
  }
  last_ = t;

  bool holds = false;
  try {
    holds = evaluate(qc_.body, kpis, checker, &v.evidence);
  } catch (const std::exception& ex) {
    v.status = VerdictStatus::Error;
    v.diagnostic = ex.what();
    return v;
  }

  if (qc_.op == TemporalOp::None) {
    v.decided.push_back({t, holds ? VerdictStatus::Satisfied : VerdictStatus::Violated});
  } else {
    const bool along = qc_.op == TemporalOp::Along;
    // Default verdict for a window that closes undecided.
    const VerdictStatus on_close = along ? VerdictStatus::Satisfied : VerdictStatus::Violated;
    auto decide = [&](Window& w, VerdictStatus s) {
      w.decided = true;
      v.decided.push_back({w.start, s});
    };

    // Windows that ended before this instant.
    while (!windows_.empty() && windows_.front().start + duration_ <= t) {
      if (!windows_.front().decided) decide(windows_.front(), on_close);
      windows_.pop_front();
    }
    windows_.push_back({t});
    for (auto& w : windows_) {
      if (w.decided) continue;
      if (along && !holds) decide(w, VerdictStatus::Violated);
      if (!along && holds) decide(w, VerdictStatus::Satisfied);
    }
    // With a known period, a window closes once the next instant can no
    // longer fall inside it.
    if (period_) {
      while (!windows_.empty() && t + *period_ >= windows_.front().start + duration_) {
        if (!windows_.front().decided) decide(windows_.front(), on_close);
        windows_.pop_front();
      }
    }
  }

  v.status = VerdictStatus::Pending;
  for (const auto& d : v.decided) {
    if (d.status == VerdictStatus::Violated) {
      if (!in_episode_) v.alert = true;
      in_episode_ = true;
      v.status = VerdictStatus::Violated;
    } else {
      in_episode_ = false;
      if (v.status == VerdictStatus::Pending) v.status = VerdictStatus::Satisfied;
    }
  }
  return v;
}

}  // namespace qospred::qc
