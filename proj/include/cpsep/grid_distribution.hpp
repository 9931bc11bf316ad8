#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cpsep/random_stream.hpp"

namespace cpsep {

using GridMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A point (i, j) on the grid [d] x [d]; stored 0-based.
struct GridPoint {
  int i = 0;
  int j = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// An ordered sequence of sample points from a grid of side d.
struct SampleSeq {
  int d = 0;
  std::vector<GridPoint> items;

  std::size_t size() const { return items.size(); }
};

// A probability distribution on [d] x [d], stored as a dense d x d
// row-major matrix of nonnegative entries summing to 1.
//
// Construction policy: entries below -1e-12 are rejected; entries in
// (-1e-12, 0) are clamped to 0 (rounding drift from mixture arithmetic).
// Totals within 1e-9 of 1 are renormalized exactly; anything further off
// is rejected as a malformed input rather than silently rescaled.
class GridDistribution {
 public:
  static constexpr int kMaxSide = 4096;
  static constexpr double kSumTolerance = 1e-9;
  static constexpr double kNegativeTolerance = 1e-12;

  explicit GridDistribution(GridMatrix mass);

  /// Validates but never rescales; deserialization uses this so that a
  /// load/store cycle is bitwise exact.
  static GridDistribution trusted(GridMatrix mass);

  int d() const { return static_cast<int>(mass_.rows()); }
  double at(int i, int j) const { return mass_(i, j); }
  const GridMatrix& matrix() const { return mass_; }

  friend bool operator==(const GridDistribution& a, const GridDistribution& b) {
    return a.mass_.rows() == b.mass_.rows() && a.mass_ == b.mass_;
  }

  std::string to_json() const;
  static GridDistribution from_json(const std::string& text);

  /// CSV with header "i,j,p"; indices are 1-based on disk.
  std::string to_csv() const;
  static GridDistribution from_csv(const std::string& text);

 private:
  GridDistribution() = default;

  GridMatrix mass_;
};

/// The uniform distribution on [d]^2 (all entries 1/d^2).
GridDistribution uniform_grid(int d);

/// Point mass at (i, j), 0-based.
GridDistribution point_mass(int d, int i, int j);

/// n i.i.d. draws from p, deterministic in the stream.
SampleSeq sample(const GridDistribution& p, std::size_t n, RandomStream& rng);

// Inverse-CDF sampler over the d^2 cells; build once, draw many.
class CdfSampler {
 public:
  explicit CdfSampler(const GridDistribution& p);
  GridPoint draw(RandomStream& rng) const;

 private:
  int d_;
  std::vector<double> cdf_;
};

}  // namespace cpsep
