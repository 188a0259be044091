#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qospred/ctmc.hpp"

using namespace qospred;

namespace {

Ctmc two_state(double rate = 1.0) { return build_ctmc(2, {{0, 1, rate}}, {{"goal", {1}}}, 0); }

/// Random chain with n states, roughly `density` outgoing edges per state.
Ctmc random_chain(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> rate(lo, hi);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<Transition> ts;
  for (std::size_t s = 0; s < n; ++s) {
    for (int k = 0; k < 3; ++k) {
      std::size_t t = pick(rng);
      if (t != s) ts.push_back({s, t, rate(rng)});
    }
  }
  return build_ctmc(n, ts, {{"goal", {n - 1}}}, 0);
}

}  // namespace

TEST_CASE("build_ctmc validates and merges transitions") {
  const Ctmc c = two_state();
  CHECK(c.num_states() == 2);
  CHECK(c.exit_rate(0) == 1.0);
  CHECK(c.exit_rate(1) == 0.0);

  const Ctmc dup = build_ctmc(2, {{0, 1, 0.5}, {0, 1, 0.5}}, {}, 0);
  CHECK(dup.num_transitions() == 1);
  CHECK(dup.rates().val[0] == 1.0);

  CHECK_THROWS_WITH_AS(build_ctmc(2, {{0, 2, 1.0}}, {}, 0), "state index out of range", ModelError);
  CHECK_THROWS_AS(build_ctmc(2, {{0, 1, 0.0}}, {}, 0), ModelError);
  CHECK_THROWS_AS(build_ctmc(2, {{0, 1, -1.0}}, {}, 0), ModelError);
  CHECK_THROWS_AS(build_ctmc(2, {{0, 0, 1.0}}, {}, 0), ModelError);
  CHECK_THROWS_AS(build_ctmc(2, {}, {{"x", {2}}}, 0), ModelError);
  CHECK_THROWS_AS(build_ctmc(0, {}, {}, 0), ModelError);
  CHECK_THROWS_AS(build_ctmc(2, {}, {}, 5), ModelError);
}

TEST_CASE("uniformize") {
  SUBCASE("two-state chain") {
    const auto u = uniformize(two_state());
    CHECK(u.rate == doctest::Approx(1.02));
    // Row 0: [1 - 1/1.02, 1/1.02]; row 1 absorbing.
    REQUIRE(u.jump.row_ptr[1] == 2);
    CHECK(u.jump.val[0] == doctest::Approx(1.0 - 1.0 / 1.02));
    CHECK(u.jump.val[1] == doctest::Approx(1.0 / 1.02));
    CHECK(u.jump.col[2] == 1);
    CHECK(u.jump.val[2] == 1.0);
  }
  SUBCASE("all absorbing gives identity") {
    const auto u = uniformize(build_ctmc(3, {}, {}, 0));
    CHECK(u.jump.nnz() == 3);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(u.jump.col[s] == s);
      CHECK(u.jump.val[s] == 1.0);
    }
  }
  SUBCASE("rows are stochastic") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
      const auto u = uniformize(random_chain(rng, 30, 0.01, 100.0));
      for (std::size_t r = 0; r < u.jump.n; ++r) {
        double sum = 0.0;
        for (std::size_t k = u.jump.row_ptr[r]; k < u.jump.row_ptr[r + 1]; ++k) {
          CHECK(u.jump.val[k] >= 0.0);
          sum += u.jump.val[k];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("transient_reach_prob examples") {
  const Ctmc c = two_state();
  CHECK(std::abs(transient_reach_prob(c, {"goal", 1.0, std::nullopt}) - (1.0 - std::exp(-1.0))) < 1e-9);

  CHECK(transient_reach_prob(c, {"goal", 0.0, std::nullopt}) == 0.0);
  CHECK(transient_reach_prob(c.with_initial_state(1), {"goal", 0.0, std::nullopt}) == 1.0);

  // 3-state birth-death, lambda = mu = 1, goal {2}, T = 2. Frozen from
  // scipy.linalg.expm on the absorbing generator.
  const Ctmc bd = build_ctmc(3, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}},
                             {{"goal", {2}}}, 0);
  CHECK(std::abs(transient_reach_prob(bd, {"goal", 2.0, std::nullopt}) - 0.4555043339901371) < 1e-9);
  CHECK(std::abs(oracle::expm_reach(bd, "goal", 2.0)[0] - 0.4555043339901371) < 1e-12);

  CHECK_THROWS_AS(transient_reach_prob(c, {"nope", 1.0, std::nullopt}), ModelError);
  CHECK_THROWS_AS(transient_reach_prob(c, {"goal", -1.0, std::nullopt}), ModelError);
}

TEST_CASE("check_prob_bound examples") {
  const Ctmc c = two_state();
  CHECK(check_prob_bound(c, {"goal", 1.0, ProbBound{Comparator::GreaterEqual, 0.1}}));
  CHECK_FALSE(check_prob_bound(c, {"goal", 1.0, ProbBound{Comparator::GreaterEqual, 0.7}}));
  CHECK(check_prob_bound(c, {"goal", 0.0, ProbBound{Comparator::GreaterEqual, 0.0}}));
  CHECK_THROWS_AS(check_prob_bound(c, {"goal", 1.0, std::nullopt}), ModelError);
  CHECK_THROWS_AS(check_prob_bound(c, {"goal", 1.0, ProbBound{Comparator::GreaterEqual, 1.5}}),
                  ModelError);
}

TEST_CASE("reachability properties on random chains") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  std::uniform_real_distribution<double> horizon(0.1, 20.0);
  for (int i = 0; i < 60; ++i) {
    const Ctmc c = random_chain(rng, size(rng), 0.01, 10.0);
    const double t1 = horizon(rng);
    const double t2 = t1 + horizon(rng);
    const auto p1 = reach_prob_all(c, "goal", t1);
    const auto p2 = reach_prob_all(c, "goal", t2);
    const auto ref = oracle::expm_reach(c, "goal", t1);
    for (std::size_t s = 0; s < c.num_states(); ++s) {
      CHECK(p1[s] >= 0.0);
      CHECK(p1[s] <= 1.0);
      CHECK(p1[s] <= p2[s] + 1e-10);
      CHECK(std::abs(p1[s] - ref[s]) <= 1e-6);
    }
  }
}

TEST_CASE("reachability agrees with simulation") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 3; ++i) {
    const Ctmc c = random_chain(rng, 10, 0.1, 2.0);
    const double p = transient_reach_prob(c, {"goal", 1.5, std::nullopt});
    const auto mc = oracle::simulate_reach(c, "goal", 1.5, 20'000, 1000 + i);
    CHECK(std::abs(p - mc.mean) <= 4.0 * mc.std_error + 1e-12);
  }
}

TEST_CASE("dump format is sorted and stable") {
  const Ctmc c = build_ctmc(3, {{2, 1, 0.25}, {0, 1, 1.5}, {1, 0, 2.0}, {0, 1, 0.5}},
                            {{"goal", {2}}, {"a", {0, 1}}}, 0);
  CHECK(c.dump() ==
        "ctmc 3\n"
        "0 1 2\n"
        "1 0 2\n"
        "2 1 0.25\n"
        "label a 0 1\n"
        "label goal 2\n");
}

TEST_CASE("comparators") {
  CHECK(parse_comparator("<=") == Comparator::LessEqual);
  CHECK(parse_comparator("≥") == Comparator::GreaterEqual);
  CHECK(parse_comparator("≠") == Comparator::NotEqual);
  CHECK_FALSE(parse_comparator("=<").has_value());
  for (auto c : {Comparator::Less, Comparator::LessEqual, Comparator::Greater,
                 Comparator::GreaterEqual, Comparator::Equal, Comparator::NotEqual}) {
    CHECK(parse_comparator(to_string(c)) == c);
  }
}
