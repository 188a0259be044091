#pragma once

#include <cstddef>
#include <vector>

namespace qospred {

/// Truncated Poisson(lambda) probabilities over [left, right].
///
/// Weights are computed by recursion outward from the mode, so no term
/// underflows regardless of lambda. Truncation points are chosen from
/// geometric tail bounds so that the neglected mass on each side is below
/// epsilon; the kept weights are then normalized to sum to one.
struct PoissonWeights {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<double> weights;  // weights[k - left] ~ P(N = k)

  double at(std::size_t k) const {
    return (k < left || k > right) ? 0.0 : weights[k - left];
  }
};

PoissonWeights poisson_weights(double lambda, double epsilon);

}  // namespace qospred
