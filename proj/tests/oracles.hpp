#pragma once

// Independent reference computations used only by the test suites. None of
// these go through uniformization or the sparse chain representation.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <vector>

#include "qospred/ctmc.hpp"

namespace oracle {

/// Dense generator with the goal states absorbing.
inline Eigen::MatrixXd absorbing_generator(const qospred::Ctmc& c, const std::vector<bool>& goal) {
  const auto n = static_cast<Eigen::Index>(c.num_states());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  const auto& r = c.rates();
  for (std::size_t s = 0; s < r.n; ++s) {
    if (goal[s]) continue;
    for (std::size_t k = r.row_ptr[s]; k < r.row_ptr[s + 1]; ++k) {
      q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r.col[k])) += r.val[k];
      q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) -= r.val[k];
    }
  }
  return q;
}

/// P(reach goal within t) from every state via exp(Q t) (Pade scaling and
/// squaring) on the absorbing generator.
inline std::vector<double> expm_reach(const qospred::Ctmc& c, const std::string& label, double t) {
  const auto& goal = c.label_mask(label);
  const Eigen::MatrixXd q = absorbing_generator(c, goal);
  const Eigen::MatrixXd e = (q * t).exp();
  std::vector<double> out(c.num_states(), 0.0);
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      if (goal[static_cast<std::size_t>(j)]) out[static_cast<std::size_t>(i)] += e(i, j);
    }
  }
  return out;
}

struct MonteCarloEstimate {
  double mean;
  double std_error;
};

/// Trajectory simulation: exponential holding times, jump proportional to
/// rate, success on entering the goal before t.
inline MonteCarloEstimate simulate_reach(const qospred::Ctmc& c, const std::string& label,
                                         double t, std::size_t runs, std::uint64_t seed) {
  const auto& goal = c.label_mask(label);
  const auto& r = c.rates();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t run = 0; run < runs; ++run) {
    std::size_t s = c.initial_state();
    double clock = 0.0;
    while (!goal[s]) {
      double exit = 0.0;
      for (std::size_t k = r.row_ptr[s]; k < r.row_ptr[s + 1]; ++k) exit += r.val[k];
      if (exit <= 0.0) break;
      clock += -std::log(1.0 - unif(rng)) / exit;
      if (clock > t) break;
      double pick = unif(rng) * exit;
      std::size_t next = r.col[r.row_ptr[s + 1] - 1];
      for (std::size_t k = r.row_ptr[s]; k < r.row_ptr[s + 1]; ++k) {
        if (pick < r.val[k]) {
          next = r.col[k];
          break;
        }
        pick -= r.val[k];
      }
      s = next;
    }
    if (goal[s]) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(runs);
  return {p, std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(runs))};
}

/// Log-space Poisson pmf.
inline double poisson_pmf(std::size_t k, double lambda) {
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

}  // namespace oracle
