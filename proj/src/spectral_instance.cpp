#include "cpsep/spectral_instance.hpp"

#include <cmath>
#include <stdexcept>

namespace cpsep {

SpectralInstance SpectralInstance::make(int d, double eps, bool rotate, RandomStream& rng) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("SpectralInstance: d must be even");
  if (eps < 0.0 || eps > 0.5) throw std::invalid_argument("SpectralInstance: eps must lie in [0, 1/2]");

  SpectralInstance inst;
  inst.d_ = d;
  inst.eps_ = eps;

  const int dim = d * d;
  const double cells = static_cast<double>(dim);
  CVector diagonal(dim);
  Eigen::VectorXd signs(dim);
  for (int i = 0; i < dim; ++i) {
    const bool heavy = i < dim / 2;
    diagonal[i] = Cplx((heavy ? 1.0 + 2.0 * eps : 1.0 - 2.0 * eps) / cells, 0.0);
    signs[i] = heavy ? -1.0 : 1.0;
  }

  CMatrix rho;
  CMatrix rotated_signs;
  if (rotate) {
    inst.unitary_ = haar_unitary(dim, rng);
    const CMatrix& u = inst.unitary_->matrix();
    rho = u * diagonal.asDiagonal() * u.adjoint();
    rotated_signs = u * signs.cast<Cplx>().asDiagonal() * u.adjoint();
  } else {
    rho = CMatrix(diagonal.asDiagonal());
    rotated_signs = CMatrix(signs.cast<Cplx>().asDiagonal());
  }
  // Symmetrize before validation; conjugation leaves ~1e-16 skew.
  rho = 0.5 * (rho + rho.adjoint());
  inst.state_ = std::make_shared<DensityMatrix>(std::move(rho), std::pair{d, d});
  inst.witness_ = CMatrix::Identity(dim, dim) / cells - inst.state_->matrix();
  inst.rotated_signs_ = 0.5 * (rotated_signs + rotated_signs.adjoint());
  return inst;
}

Eigen::VectorXd SpectralInstance::spectrum() const {
  const int dim = d_ * d_;
  Eigen::VectorXd s(dim);
  const double cells = static_cast<double>(dim);
  for (int i = 0; i < dim; ++i) {
    s[i] = (i < dim / 2 ? 1.0 + 2.0 * eps_ : 1.0 - 2.0 * eps_) / cells;
  }
  return s;
}

Eigen::VectorXd SpectralInstance::sign_diagonal() const {
  const int dim = d_ * d_;
  Eigen::VectorXd s(dim);
  for (int i = 0; i < dim; ++i) s[i] = i < dim / 2 ? -1.0 : 1.0;
  return s;
}

const UnitaryMatrix& SpectralInstance::unitary() const {
  if (!unitary_) throw std::logic_error("SpectralInstance: unrotated instance has no unitary");
  return *unitary_;
}

WitnessVerdict holder_witness_check(const SpectralInstance& inst, const DensityMatrix& sigma) {
  if (sigma.dim() != inst.dim()) {
    throw std::invalid_argument("holder_witness_check: dimension mismatch");
  }
  WitnessVerdict v;
  const double winf = inst.witness_inf_norm();
  if (winf <= 0.0) return v;  // eps = 0: no witness scale, inconclusive
  v.t = (sigma.matrix() * inst.witness_operator()).trace().real() / winf;
  v.margin_l1 = 2.0 * inst.eps() + v.t;
  v.certified = v.t >= -inst.eps();
  return v;
}

double pure_quadratic_form(const SpectralInstance& inst, const CVector& joint) {
  if (joint.size() != inst.dim()) {
    throw std::invalid_argument("pure_quadratic_form: dimension mismatch");
  }
  return (joint.adjoint() * inst.rotated_sign_diagonal() * joint)(0, 0).real();
}

double pure_quadratic_form(const SpectralInstance& inst, const PureProductState& s) {
  return pure_quadratic_form(inst, s.joint());
}

double gurvits_barnum_threshold(int d) {
  if (d < 2) throw std::invalid_argument("gurvits_barnum_threshold: d must be >= 2");
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(d) * d - 1.0));
}

}  // namespace cpsep
