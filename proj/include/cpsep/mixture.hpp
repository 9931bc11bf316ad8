#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cpsep/grid_distribution.hpp"

namespace cpsep {

// A convex mixture of i.i.d. product distributions: components (c_k, v_k)
// with probability-vector marginals v_k, representing sum c_k v_k v_k^T.
// This is exactly the completely positive certificate format.
struct MixtureOfProducts {
  struct Component {
    double weight = 0.0;
    Eigen::VectorXd marginal;
  };
  std::vector<Component> components;

  int d() const { return components.empty() ? 0 : static_cast<int>(components.front().marginal.size()); }
};

// Rescales raw nonnegative (weight, vector) pairs into a proper mixture:
// v <- v/||v||_1 with weight c <- c ||v||_1^2, then weights renormalized
// to sum 1. The represented matrix changes only by that overall scale.
MixtureOfProducts normalize_mixture(
    const std::vector<std::pair<double, Eigen::VectorXd>>& raw);

/// Materializes sum c_k v_k v_k^T as a GridDistribution.
GridDistribution mixture_to_distribution(const MixtureOfProducts& mix);

}  // namespace cpsep
