#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpsep/grid_distribution.hpp"
#include "cpsep/random_stream.hpp"
#include "cpsep/report.hpp"

namespace cpsep {

// A hard instance built from a half-size subset S of [d]: the density is
// 1 + eps on the bipartite block S x S^c (and its mirror) and 1 - eps
// elsewhere, so it averages to 1 against the uniform distribution. The
// matrix form is eps-far in l1 from every CP distribution, certified by
// the indicator cut of S.
class SubsetInstance {
 public:
  SubsetInstance(int d, std::vector<int> subset, double eps);

  static SubsetInstance first_half(int d, double eps);
  static SubsetInstance random(int d, double eps, RandomStream& rng);

  int d() const { return d_; }
  double eps() const { return eps_; }
  bool contains(int i) const { return member_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& subset() const { return subset_; }

  /// Density w.r.t. uniform via the block cases.
  double density(int i, int j) const;
  /// Same value via 1 - chi(i) chi(j) eps; kept as an independent route.
  double density_via_signs(int i, int j) const;

  /// The distribution with cells density/d^2.
  GridDistribution distribution() const;

  /// Indicator signs of S: +1 on S, -1 off it.
  std::vector<int> indicator_signs() const;

 private:
  int d_;
  double eps_;
  std::vector<int> subset_;
  std::vector<char> member_;
};

/// The n-sample mixture: draw a uniformly random half-size subset, then n
/// i.i.d. points from its instance distribution.
struct SubsetMixtureSpec {
  int d = 0;
  double eps = 0.0;
  std::int64_t n = 0;

  SubsetMixtureSpec(int d, double eps, std::int64_t n);
};

/// Side cap for exact subset enumeration (C(d, d/2) terms).
inline constexpr int kMaxExactSide = 16;
/// Cap on d^(2n) for exact sequence enumeration.
inline constexpr double kMaxExactSequences = 1e7;

SampleSeq sample_mixture_sequence(const SubsetMixtureSpec& spec, RandomStream& rng);

/// Density of seq w.r.t. the uniform product measure, averaged over all
/// half-size subsets. Exact enumeration; requires d <= 16.
double mixture_sequence_density(const SubsetMixtureSpec& spec, const SampleSeq& seq);

// Exact chi^2 distance between the n-sample mixture and the uniform
// product: E over subset pairs of (1 + eps^2 delta^2)^n - 1, with
// delta = 4r/d - 1 and r the hypergeometric overlap.
double mixture_chi2_exact(const SubsetMixtureSpec& spec);

/// Analytic ceiling 1/(c - 1) with c = d/(4 n eps^2); empty when c <= 1.
std::optional<double> mixture_chi2_bound(const SubsetMixtureSpec& spec);

/// The explicit sample-size constant ceil(d / (16 eps^2)).
std::int64_t sample_complexity_threshold(int d, double eps);

/// Exact TV between the mixture and the uniform product, by sequence
/// enumeration; empty when infeasible.
std::optional<double> mixture_tv_exact(const SubsetMixtureSpec& spec);

// Distinguishing experiment across a grid of sample counts: exact TV when
// enumerable, Monte Carlo advantage of the likelihood-ratio test (accept
// uniform on ties), and the analytic chi^2 ceiling columns.
ExperimentReport distinguishing_experiment(int d, double eps,
                                           const std::vector<std::int64_t>& n_grid,
                                           std::int64_t trials, RandomStream& rng);

}  // namespace cpsep
