#pragma once

#include "cpsep/grid_distribution.hpp"
#include "cpsep/mixture.hpp"
#include "cpsep/random_stream.hpp"

namespace cpsep {

struct CpFitResult {
  double distance_l1 = 0.0;
  MixtureOfProducts mixture;
};

// Heuristic upper bound on the entrywise l1 distance from A to the set of
// completely positive distributions. Conditional-gradient fitting: each
// round adds the rank-one product term best aligned with the residual
// (exact over 1- and 2-point supports, exponentiated-gradient refined for
// wider ones), takes an exact line-search step, re-optimizes weights with
// 200 multiplicative updates, then applies exact pairwise weight transfers
// until stable. Returns the best mixture found and its distance; the value
// always dominates any valid farness lower bound for the same A.
CpFitResult cp_distance_upper_bound(const GridDistribution& a, int component_budget,
                                    int iters, RandomStream& rng);

}  // namespace cpsep
