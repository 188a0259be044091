#include "qospred/poisson.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace qospred {

PoissonWeights poisson_weights(double lambda, double epsilon) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("poisson_weights: lambda must be finite and >= 0");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("poisson_weights: epsilon must be in (0, 1)");
  }
  PoissonWeights out;
  if (lambda == 0.0) {
    out.weights = {1.0};
    return out;
  }

  const auto mode = static_cast<std::size_t>(std::floor(lambda));
  // Unnormalized weights relative to the mode (w[mode] = 1). The running
  // total only grows, so tail bounds measured against it are conservative
  // once divided by the final total.
  std::deque<double> w{1.0};
  double total = 1.0;

  // Right tail: for k > lambda - 1 the ratio w[k+1]/w[k] = lambda/(k+1) < 1
  // and decreasing, so tail beyond k is at most w[k] r / (1 - r).
  std::size_t right = mode;
  double wk = 1.0;
  for (;;) {
    const double r = lambda / static_cast<double>(right + 2);
    const double next = wk * lambda / static_cast<double>(right + 1);
    if (r < 1.0 && next / (1.0 - r) <= epsilon * total) break;
    ++right;
    wk = next;
    w.push_back(wk);
    total += wk;
  }

  // Left tail: for k <= lambda the ratio w[k-1]/w[k] = k/lambda <= 1 and
  // decreasing as k falls, so mass below k is at most w[k-1] / (1 - r).
  std::size_t left = mode;
  wk = 1.0;
  while (left > 0) {
    const double prev = wk * static_cast<double>(left) / lambda;
    const double r = static_cast<double>(left - 1) / lambda;
    if (prev / (1.0 - r) <= epsilon * total) break;
    --left;
    wk = prev;
    w.push_front(wk);
    total += wk;
  }

  out.left = left;
  out.right = right;
  out.weights.assign(w.begin(), w.end());
  for (double& x : out.weights) x /= total;
  return out;
}

}  // namespace qospred
