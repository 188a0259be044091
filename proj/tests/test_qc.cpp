#include <doctest.h>

#include <cmath>
#include <random>

#include "ast_gen.hpp"
#include "qospred/qc.hpp"

using namespace qospred;
using namespace qospred::qc;

namespace {

/// Checker returning a fixed probability.
struct FixedChecker final : Checker {
  double p = 0.0;
  double reach_probability(const CslFormula&) const override { return p; }
};

Timestamp at(double minutes) { return from_minutes(minutes); }

Comparator negate(Comparator c) {
  switch (c) {
    case Comparator::Less: return Comparator::GreaterEqual;
    case Comparator::LessEqual: return Comparator::Greater;
    case Comparator::Greater: return Comparator::LessEqual;
    case Comparator::GreaterEqual: return Comparator::Less;
    case Comparator::Equal: return Comparator::NotEqual;
    case Comparator::NotEqual: return Comparator::Equal;
  }
  return c;
}

}  // namespace

TEST_CASE("parse the shipped constraints") {
  const Qc safety = parse_qc(R"(eval(P>=0.1 [ F<=30 "violState" ]) = false)");
  CHECK(safety.op == TemporalOp::None);
  CHECK(safety.body.op == Comparator::Equal);
  CHECK(safety.body.rhs == Term{Const{false}});
  const CslFormula f1{ProbBound{Comparator::GreaterEqual, 0.1}, 30.0, "violState"};
  CHECK(safety.body.lhs == Term{Eval{f1}});

  const Qc within = parse_qc(R"(eval(P=? [ F<=30 "violState" ]) <= 0.05 within 30m)");
  CHECK(within.op == TemporalOp::Within);
  CHECK(within.duration_min == 30.0);
  CHECK(within.body.op == Comparator::LessEqual);
  CHECK(within.body.lhs == Term{Eval{CslFormula{std::nullopt, 30.0, "violState"}}});
  CHECK(within.body.rhs == Term{Const{0.05}});

  const Qc along = parse_qc("balance >= -200 along 60m");
  CHECK(along.op == TemporalOp::Along);
  CHECK(along.duration_min == 60.0);
  CHECK(along.body.lhs == Term{KpiRef{"balance"}});
  CHECK(along.body.op == Comparator::GreaterEqual);
  CHECK(along.body.rhs == Term{Const{-200.0}});
}

TEST_CASE("grammar details") {
  CHECK(parse_qc("x<=1 within 2h").duration_min == 120.0);
  CHECK(parse_qc("  eval( P =? [F <= 15 \"violState\"] )>=0.5  ") ==
        parse_qc("eval(P=? [ F<=15 \"violState\" ]) >= 0.5"));
  CHECK(parse_qc("x ≤ 3").body.op == Comparator::LessEqual);
  CHECK(parse_qc("x != 3").body.op == Comparator::NotEqual);
  CHECK(parse_qc("x < 1e-3").body.rhs == Term{Const{1e-3}});
  CHECK(print(parse_qc("x<=1 within 2h")) == "x <= 1 within 120m");
}

TEST_CASE("parse errors carry positions") {
  auto error_at = [](std::string_view text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_qc(text, 7);
    } catch (const ParseError& e) {
      return {e.line, e.column};
    }
    FAIL("no parse error for: " << text);
    return {0, 0};
  };
  CHECK(error_at("balance =< 3") == std::pair<std::size_t, std::size_t>{7, 9});
  CHECK(error_at("balance <= 3 within 30") == std::pair<std::size_t, std::size_t>{7, 21});
  CHECK(error_at("balance <= 3 within 30s").second == 21);
  CHECK(error_at("balance <= 3 within 0m").second == 21);
  CHECK(error_at("balance <=").second == 11);
  CHECK(error_at("eval(P>=1.5 [ F<=30 \"v\" ]) = true").second == 9);
  CHECK(error_at("eval(P>=0.5 [ F<=0 \"v\" ]) = true").second == 18);
  CHECK(error_at("eval(P>=0.5 [ F<=3 \"v ]) = true").second == 20);
  CHECK(error_at("eval(P=? [ F<=3 \"v\" ]) = true").second == 1);
  CHECK(error_at("true < false").second == 6);
  CHECK(error_at("x < 3 along 5m extra").second == 16);
  CHECK(error_at("x $ 3").second == 3);
  CHECK_THROWS_WITH_AS(parse_qc("a =< b"), doctest::Contains("unknown comparator"), ParseError);
  CHECK_THROWS_WITH_AS(parse_qc("a < b within 5"), doctest::Contains("malformed duration"),
                       ParseError);
}

TEST_CASE("random ASTs survive print and parse") {
  testgen::AstGen gen{std::mt19937_64{42}};
  for (int i = 0; i < 2000; ++i) {
    const Qc ast = gen.qc();
    const std::string text = print(ast);
    CAPTURE(text);
    const Qc back = parse_qc(text);
    CHECK(back == ast);
    CHECK(print(back) == text);
  }
}

TEST_CASE("constraint files") {
  const auto qcs = parse_qc_file(
      "# comment\n"
      "\n"
      "eval(P>=0.1 [ F<=30 \"violState\" ]) = false\n"
      "   # indented comment\n"
      "eval(P=? [ F<=30 \"violState\" ]) <= 0.05 within 30m\n");
  REQUIRE(qcs.size() == 2);
  CHECK(qcs[0].id == "qc1");
  CHECK(qcs[0].line == 3);
  CHECK(qcs[1].id == "qc2");
  CHECK(qcs[1].line == 5);
  try {
    parse_qc_file("x < 1\n\ny <\n");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("eval_csl on a two-state chain") {
  const Ctmc c = build_ctmc(2, {{0, 1, 1.0}}, {{"violState", {1}}}, 0);
  const CslValue q = eval_csl({std::nullopt, 1.0, "violState"}, c);
  CHECK(std::get<double>(q) == doctest::Approx(0.6321205588285577).epsilon(1e-9));
  const CslValue b = eval_csl({ProbBound{Comparator::GreaterEqual, 0.1}, 1.0, "violState"}, c);
  CHECK(std::get<bool>(b));
  CHECK_THROWS_AS(eval_csl({std::nullopt, 1.0, "missing"}, c), ModelError);
  // Bit-identical on repeated evaluation.
  for (int i = 0; i < 5; ++i) {
    CHECK(std::get<double>(eval_csl({std::nullopt, 1.0, "violState"}, c)) == std::get<double>(q));
  }
}

TEST_CASE("time-zero query") {
  // The grammar requires a positive bound; the checker still handles zero.
  const Ctmc c = build_ctmc(2, {{0, 1, 1.0}}, {{"violState", {1}}}, 0);
  CHECK(std::get<double>(eval_csl({std::nullopt, 0.0, "violState"}, c)) == 0.0);
}

TEST_CASE("monitor: within closes violated after two high predictions") {
  QcMonitor m("p3", parse_qc(R"(eval(P=? [ F<=30 "violState" ]) <= 0.05 within 30m)"), 15.0);
  FixedChecker ck;
  ck.p = 0.06;
  auto v0 = m.step(at(0), {}, ck);
  CHECK(v0.status == VerdictStatus::Pending);
  REQUIRE(v0.evidence.size() == 1);
  CHECK(v0.evidence[0].value == 0.06);
  ck.p = 0.07;
  auto v1 = m.step(at(15), {}, ck);
  CHECK(v1.status == VerdictStatus::Violated);
  CHECK(v1.alert);
  REQUIRE(v1.decided.size() == 1);
  CHECK(v1.decided[0].window_start == at(0));
}

TEST_CASE("monitor: without a known period the window closes on time") {
  QcMonitor m("p3", parse_qc("x <= 0.05 within 30m"));
  FixedChecker ck;
  CHECK(m.step(at(0), {{"x", 0.06}}, ck).status == VerdictStatus::Pending);
  CHECK(m.step(at(15), {{"x", 0.07}}, ck).status == VerdictStatus::Pending);
  const auto v = m.step(at(30), {{"x", 0.08}}, ck);
  CHECK(v.status == VerdictStatus::Violated);
  CHECK(v.alert);
}

TEST_CASE("monitor: within is existential") {
  QcMonitor m("w", parse_qc("x > 0 within 30m"));
  FixedChecker ck;
  CHECK(m.step(at(0), {{"x", -1.0}}, ck).status == VerdictStatus::Pending);
  const auto v = m.step(at(15), {{"x", 1.0}}, ck);
  CHECK(v.status == VerdictStatus::Satisfied);
  CHECK(v.timestamp == at(15));
}

TEST_CASE("monitor: along is universal") {
  QcMonitor m("a", parse_qc("x > 0 along 30m"));
  FixedChecker ck;
  CHECK(m.step(at(0), {{"x", 1.0}}, ck).status == VerdictStatus::Pending);
  const auto v = m.step(at(15), {{"x", -1.0}}, ck);
  CHECK(v.status == VerdictStatus::Violated);
  CHECK(v.alert);
  CHECK(v.decided.size() == 2);
}

TEST_CASE("monitor: safety constraints and episodes") {
  QcMonitor m("s", parse_qc(R"(eval(P>=0.1 [ F<=30 "violState" ]) = false)"));
  FixedChecker ck;
  const double probs[] = {0.01, 0.2, 0.3, 0.05, 0.4};
  const VerdictStatus expect[] = {VerdictStatus::Satisfied, VerdictStatus::Violated,
                                  VerdictStatus::Violated, VerdictStatus::Satisfied,
                                  VerdictStatus::Violated};
  const bool alerts[] = {false, true, false, false, true};
  for (int i = 0; i < 5; ++i) {
    ck.p = probs[i];
    const auto v = m.step(at(15.0 * i), {}, ck);
    CHECK(v.status == expect[i]);
    CHECK(v.alert == alerts[i]);
  }
}

TEST_CASE("monitor: errors") {
  QcMonitor m("e", parse_qc("x > 0"));
  FixedChecker ck;
  auto v = m.step(at(0), {}, ck);
  CHECK(v.status == VerdictStatus::Error);
  CHECK(v.diagnostic.find("missing KPI") != std::string::npos);
  CHECK(m.step(at(15), {{"x", 1.0}}, ck).status == VerdictStatus::Satisfied);
  v = m.step(at(15), {{"x", 1.0}}, ck);
  CHECK(v.status == VerdictStatus::Error);

  const Ctmc c = build_ctmc(2, {{0, 1, 1.0}}, {{"violState", {1}}}, 0);
  QcMonitor bad("b", parse_qc(R"(eval(P=? [ F<=30 "nolabel" ]) < 0.5)"));
  v = bad.step(at(0), {}, CtmcChecker(c));
  CHECK(v.status == VerdictStatus::Error);
  CHECK(v.diagnostic.find("nolabel") != std::string::npos);
}

TEST_CASE("along P matches not within not P on every window") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> gap(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const double duration = 15.0 * std::uniform_int_distribution<int>(1, 4)(rng);
    Qc along = parse_qc("x > 0.2 along 30m");
    along.duration_min = duration;
    Qc within_not = along;
    within_not.op = TemporalOp::Within;
    within_not.body.op = negate(along.body.op);
    const std::optional<double> period =
        std::uniform_int_distribution<int>(0, 1)(rng) ? std::optional<double>(15.0) : std::nullopt;
    QcMonitor ma("a", along, period);
    QcMonitor mw("w", within_not, period);
    FixedChecker ck;
    double t = 0.0;
    std::map<Timestamp, VerdictStatus> da, dw;
    for (int i = 0; i < 40; ++i) {
      const KpiValues k{{"x", val(rng)}};
      const auto va = ma.step(at(t), k, ck);
      const auto vw = mw.step(at(t), k, ck);
      for (const auto& d : va.decided) {
        CHECK(da.emplace(d.window_start, d.status).second);  // decided once
      }
      for (const auto& d : vw.decided) CHECK(dw.emplace(d.window_start, d.status).second);
      t += period ? 15.0 : 15.0 * gap(rng);
    }
    CHECK(da.size() == dw.size());
    for (const auto& [start, s] : da) {
      REQUIRE(dw.count(start) == 1);
      const auto negated = dw[start] == VerdictStatus::Satisfied ? VerdictStatus::Violated
                                                                  : VerdictStatus::Satisfied;
      CHECK(s == negated);
    }
  }
}
