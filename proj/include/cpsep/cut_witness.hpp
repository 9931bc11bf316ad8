#pragma once

#include <string>
#include <vector>

#include "cpsep/grid_distribution.hpp"
#include "cpsep/random_stream.hpp"

namespace cpsep {

// A bipartition of [d] as a sign vector, with the quadratic form x^T A x
// and the cut weight 1/2 - 1/2 x^T A x it induces on the distribution A.
// A strictly negative quadratic form certifies l1 distance at least
// -x^T A x from every completely positive distribution.
struct CutWitness {
  std::vector<int> signs;  // entries +-1
  double quad_form = 0.0;
  double cut_weight = 0.0;

  std::string to_json() const;
  static CutWitness from_json(const std::string& text);
};

/// Evaluates the cut given by the sign vector x on A.
CutWitness cut_value(const GridDistribution& a, const std::vector<int>& signs);

enum class BestCutMode { exhaustive, local_search };

// Searches for the sign vector minimizing x^T A x. Exhaustive mode
// (d <= 24) is globally optimal up to the x <-> -x symmetry; local-search
// mode runs steepest single-flip descent over seeded restarts and returns
// the best 1-flip-stable local optimum, ties broken by lowest flipped index.
CutWitness best_cut(const GridDistribution& a, BestCutMode mode, RandomStream& rng,
                    int restarts = 64);

struct DnnVerdict {
  enum class Violation { none, symmetry, negative_entry, not_psd };
  bool pass = false;
  Violation violation = Violation::none;
  double measured = 0.0;  // the offending magnitude
  std::string reason;
};

// Necessary conditions for complete positivity: symmetry, nonnegative
// entries, positive semidefiniteness. For d >= 5 these do not suffice.
DnnVerdict doubly_nonnegative_check(const GridDistribution& a, double tol = 1e-9);

// Lower bound max(0, -quad_form) on the entrywise l1 distance from A to
// every CP distribution. The witness must match A: the quadratic form is
// recomputed and a disagreement beyond 1e-12 is rejected as stale.
double cp_farness_lower_bound(const GridDistribution& a, const CutWitness& witness);

}  // namespace cpsep
