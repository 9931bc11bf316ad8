#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cpsep/grid_distribution.hpp"
#include "cpsep/mixture.hpp"
#include "cpsep/random_stream.hpp"
#include "cpsep/report.hpp"

namespace cpsep {

/// An upper-triangular index pair (i < j) of [d].
struct PairIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

/// The product distribution with mass 1/4 on each of (i,i), (i,j), (j,i),
/// (j,j): the two-fold product of the half-half marginal on {i, j}.
GridDistribution pair_product(int i, int j, int d);

// One matched edge of pairs (a, b): bit 0 mixes (1+eps)/2 a + (1-eps)/2 b,
// bit 1 swaps the weights.
GridDistribution matched_pair_mixture(PairIndex a, PairIndex b, int bit, double eps, int d);

// The Fano packing: all C(d,2) index pairs, a deterministic perfect
// matching (lexicographic halves), and a binary code with pairwise Hamming
// distance >= 0.4 m selecting which side of each matched edge gets the
// heavy weight. Every member distribution has exact diagonal 3/(4d) after
// the diagonal correction and is completely positive by construction.
class PackingEnsemble {
 public:
  using Codeword = std::vector<std::uint8_t>;

  static PackingEnsemble build(int d, double eps, int code_size_target, RandomStream& rng);

  int d() const { return d_; }
  double eps() const { return eps_; }
  int m() const { return static_cast<int>(matching_.size()); }
  const std::vector<PairIndex>& pairs() const { return pairs_; }
  const std::vector<std::pair<int, int>>& matching() const { return matching_; }
  const std::vector<Codeword>& code() const { return code_; }
  int code_size_target() const { return code_size_target_; }
  bool reached_target() const { return static_cast<int>(code_.size()) >= code_size_target_; }

  /// Per-index diagonal deviation of the uncorrected mixture, in [-eps, eps].
  std::vector<double> diagonal_deviation(const Codeword& w) const;

  /// The corrected member p_w with uniform diagonal 3/(4d).
  GridDistribution distribution(const Codeword& w) const;

  /// Explicit CP certificate: pair products plus diagonal point masses.
  MixtureOfProducts explicit_mixture(const Codeword& w) const;

  /// Closed-form TV between members: Delta(w, w') eps / (4m).
  double tv_closed_form(const Codeword& w, const Codeword& v) const;

  // Closed-form KL between members:
  //   Delta(w, w') / (4m) * eps * ln((1+eps)/(1-eps)).
  // Direct summation fixes the constant at 1/(4m); the /(8m) sometimes
  // quoted for this family counts only upper-triangular cells.
  double kl_closed_form(const Codeword& w, const Codeword& v) const;

  static int hamming(const Codeword& w, const Codeword& v);

  std::string to_json(bool include_distributions = false) const;

 private:
  PackingEnsemble() = default;

  int d_ = 0;
  double eps_ = 0.0;
  int code_size_target_ = 0;
  std::vector<PairIndex> pairs_;
  std::vector<std::pair<int, int>> matching_;  // indices into pairs_
  std::vector<Codeword> code_;
};

/// Fano sample bound ceil(((1 - fail_prob) ln N - ln 2) / kl_max),
/// clamped at zero.
std::int64_t fano_sample_bound(std::int64_t n_hypotheses, double kl_max, double fail_prob);

// Plug-in learner sweep: per sample count, draw a random codeword, learn
// the empirical distribution, record TV to the truth and the nearest-
// codeword identification error. n = 0 falls back to the uniform
// hypothesis as the baseline.
ExperimentReport plugin_learner_experiment(const PackingEnsemble& ensemble,
                                           const std::vector<std::int64_t>& n_grid,
                                           std::int64_t trials, RandomStream& rng);

}  // namespace cpsep
