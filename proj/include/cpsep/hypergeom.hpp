#pragma once

namespace cpsep {

/// Binomial coefficient C(n, k) as a double; exact up to n = 62, lgamma beyond.
double binomial(int n, int k);

// Overlap law of two independent uniformly random half-size subsets of [d]:
// pmf(r) = C(d/2, r)^2 / C(d, d/2) on r in {0, ..., d/2}.
double hypergeom_pmf(int d, int r);

/// Exact upper tail: sum of hypergeom_pmf(d, r) over r >= r_min.
double hypergeom_exact_tail(int d, int r_min);

/// Hoeffding-type tail evaluator exp(-2 s^2 m) for a hypergeometric share.
double hypergeom_tail_bound(double m, double s);

}  // namespace cpsep
