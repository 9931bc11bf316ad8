#include "cpsep/haar.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace cpsep {
namespace {

CMatrix ginibre(int dim, RandomStream& rng) {
  CMatrix g(dim, dim);
  const double scale = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double re = rng.next_gaussian();
      const double im = rng.next_gaussian();
      g(i, j) = Cplx(re * scale, im * scale);
    }
  }
  return g;
}

}  // namespace

CVector random_unit_vector(int dim, RandomStream& rng) {
  if (dim < 1) throw std::invalid_argument("random_unit_vector: dim must be >= 1");
  CVector v(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = rng.next_gaussian();
    const double im = rng.next_gaussian();
    v[i] = Cplx(re, im);
  }
  const double norm = v.norm();
  if (norm == 0.0) return random_unit_vector(dim, rng);
  return v / norm;
}

UnitaryMatrix haar_unitary(int dim, RandomStream& rng) {
  if (dim < 1) throw std::invalid_argument("haar_unitary: dim must be >= 1");
  const CMatrix g = ginibre(dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Cplx rjj = r(j, j);
    const double mag = std::abs(rjj);
    // Unique positive-diagonal convention; a zero pivot has measure zero.
    const Cplx phase = mag > 0.0 ? rjj / mag : Cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return UnitaryMatrix(std::move(q));
}

CMatrix naive_qr_unitary(int dim, RandomStream& rng) {
  const CMatrix g = ginibre(dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ();
}

}  // namespace cpsep
