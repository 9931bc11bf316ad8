#pragma once

#include "cpsep/grid_distribution.hpp"

namespace cpsep {

/// Total variation distance, (1/2) sum |p - q|, in [0, 1].
double tv_distance(const GridDistribution& p, const GridDistribution& q);

/// Entrywise l1 distance, sum |p - q| = 2 * tv_distance.
double l1_distance(const GridDistribution& p, const GridDistribution& q);

/// chi^2 distance sum p^2/q - 1. Returns +inf when p has mass where q has none.
double chi2_distance(const GridDistribution& p, const GridDistribution& q);

/// KL divergence sum p ln(p/q) in nats, with 0 ln 0 = 0. Returns +inf when
/// absolute continuity fails.
double kl_divergence(const GridDistribution& p, const GridDistribution& q);

}  // namespace cpsep
