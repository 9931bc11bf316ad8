#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>

namespace cpsep {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Unitary operator; construction validates U+U = I to 1e-9 (max entry).
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(CMatrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }

 private:
  CMatrix entries_;
};

// A quantum state: Hermitian, trace-1, PSD complex matrix. Validation
// tolerances are 1e-9; eigensolves elsewhere symmetrize first so that
// construction drift does not hide construction bugs.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-9;

  explicit DensityMatrix(CMatrix entries,
                         std::optional<std::pair<int, int>> bipartite = std::nullopt);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  const std::optional<std::pair<int, int>>& bipartite() const { return bipartite_; }

  std::string to_json() const;
  static DensityMatrix from_json(const std::string& text);

 private:
  CMatrix entries_;
  std::optional<std::pair<int, int>> bipartite_;
};

/// A pure product state |x (x) y>; both factors unit vectors (1e-12).
struct PureProductState {
  CVector left;
  CVector right;

  PureProductState(CVector l, CVector r);

  int local_dim() const { return static_cast<int>(left.size()); }
  /// The joint vector x (x) y in dimension d^2.
  CVector joint() const;
};

/// The identity/dim state.
DensityMatrix maximally_mixed(int dim);

/// Trace distance (1/2)||rho - sigma||_1 via a Hermitian eigensolve.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Schatten p-norm of an arbitrary square matrix; p must be 1, 2 or +inf.
double schatten_norm(const CMatrix& t, double p);

/// tr(rho^2), real part.
double purity(const DensityMatrix& rho);

/// U rho U+; spectrum and trace preserved.
DensityMatrix conjugate(const DensityMatrix& rho, const UnitaryMatrix& u);

/// Rank-one projector onto x (x) y, tagged bipartite (d, d).
DensityMatrix product_pure_density(const PureProductState& s);

}  // namespace cpsep
