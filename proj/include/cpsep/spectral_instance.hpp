#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "cpsep/density_matrix.hpp"
#include "cpsep/haar.hpp"
#include "cpsep/random_stream.hpp"

namespace cpsep {

// A bipartite state with half the spectrum at (1+2eps)/d^2 and half at
// (1-2eps)/d^2, optionally rotated by a Haar unitary. Caches the witness
// operator W = I/d^2 - rho and the rotated sign diagonal it is a multiple
// of. Exact identities: ||W||_inf = 2eps/d^2, tr(rho W) = -4eps^2/d^2,
// trace distance to the maximally mixed state exactly eps.
class SpectralInstance {
 public:
  static SpectralInstance make(int d, double eps, bool rotate, RandomStream& rng);

  int local_dim() const { return d_; }
  int dim() const { return d_ * d_; }
  double eps() const { return eps_; }

  const DensityMatrix& state() const { return *state_; }
  const CMatrix& witness_operator() const { return witness_; }
  double witness_inf_norm() const { return 2.0 * eps_ / (static_cast<double>(d_) * d_); }

  /// Spectrum of the unrotated diagonal, largest entries first.
  Eigen::VectorXd spectrum() const;

  /// The +-1 sign diagonal (I/d^2 - D)/||W||_inf, as a vector; -1 first.
  Eigen::VectorXd sign_diagonal() const;

  /// U X U+ where X is the sign diagonal; equals W/||W||_inf for eps > 0.
  const CMatrix& rotated_sign_diagonal() const { return rotated_signs_; }

  bool rotated() const { return unitary_.has_value(); }
  const UnitaryMatrix& unitary() const;

 private:
  SpectralInstance() = default;

  int d_ = 0;
  double eps_ = 0.0;
  std::optional<UnitaryMatrix> unitary_;
  std::shared_ptr<const DensityMatrix> state_;
  CMatrix witness_;
  CMatrix rotated_signs_;
};

struct WitnessVerdict {
  bool certified = false;
  /// Lower bound 2 eps + t on ||rho - sigma||_1 implied by the witness.
  double margin_l1 = 0.0;
  /// tr(sigma W)/||W||_inf.
  double t = 0.0;
};

// Certifies sigma far from rho when tr(sigma W) >= -eps ||W||_inf; the
// certified margin 2 eps + t then lower-bounds ||rho - sigma||_1 (so in
// particular it is >= eps). eps = 0 degenerates to inconclusive.
WitnessVerdict holder_witness_check(const SpectralInstance& inst, const DensityMatrix& sigma);

/// <x (x) y| U X U+ |x (x) y> in [-1, 1].
double pure_quadratic_form(const SpectralInstance& inst, const PureProductState& s);

/// Same form evaluated on a prebuilt joint vector (hot path for nets).
double pure_quadratic_form(const SpectralInstance& inst, const CVector& joint);

// Radius 1/(2 sqrt(d^2 - 1)) of the separable neighborhood of the
// maximally mixed state: below this eps every spectral instance is
// separable, so farness certification is impossible.
double gurvits_barnum_threshold(int d);

}  // namespace cpsep
