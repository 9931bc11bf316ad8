#include "cpsep/density_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace cpsep {

UnitaryMatrix::UnitaryMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("UnitaryMatrix: square matrix required");
  }
  const CMatrix defect = entries_.adjoint() * entries_ - CMatrix::Identity(entries_.rows(), entries_.cols());
  if (defect.cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("UnitaryMatrix: U+U deviates from identity beyond 1e-9");
  }
}

DensityMatrix::DensityMatrix(CMatrix entries, std::optional<std::pair<int, int>> bipartite)
    : entries_(std::move(entries)), bipartite_(bipartite) {
  const auto n = entries_.rows();
  if (n < 1 || entries_.cols() != n) {
    throw std::invalid_argument("DensityMatrix: square matrix required");
  }
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kTolerance) {
    throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-9");
  }
  const Cplx tr = entries_.trace();
  if (std::abs(tr - Cplx(1.0, 0.0)) > kTolerance) {
    throw std::invalid_argument("DensityMatrix: trace must be 1 within 1e-9");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (entries_ + entries_.adjoint()),
                                                Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kTolerance) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond 1e-9");
  }
  if (bipartite_) {
    const auto [da, db] = *bipartite_;
    if (static_cast<long long>(da) * db != n) {
      throw std::invalid_argument("DensityMatrix: bipartite tag does not match dim");
    }
  }
}

std::string DensityMatrix::to_json() const {
  nlohmann::json j;
  j["dim"] = dim();
  auto re = nlohmann::json::array();
  auto im = nlohmann::json::array();
  for (int i = 0; i < dim(); ++i) {
    auto re_row = nlohmann::json::array();
    auto im_row = nlohmann::json::array();
    for (int k = 0; k < dim(); ++k) {
      re_row.push_back(entries_(i, k).real());
      im_row.push_back(entries_(i, k).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j.dump();
}

DensityMatrix DensityMatrix::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int n = j.at("dim").get<int>();
  CMatrix m(n, n);
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      m(i, k) = Cplx(re.at(i).at(k).get<double>(), im.at(i).at(k).get<double>());
    }
  }
  return DensityMatrix(std::move(m));
}

PureProductState::PureProductState(CVector l, CVector r)
    : left(std::move(l)), right(std::move(r)) {
  if (left.size() < 1 || left.size() != right.size()) {
    throw std::invalid_argument("PureProductState: factors must share a dimension >= 1");
  }
  if (std::abs(left.norm() - 1.0) > 1e-12 || std::abs(right.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("PureProductState: factors must be unit vectors");
  }
}

CVector PureProductState::joint() const {
  const int d = local_dim();
  CVector v(static_cast<Eigen::Index>(d) * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) v[static_cast<Eigen::Index>(a) * d + b] = left[a] * right[b];
  }
  return v;
}

DensityMatrix maximally_mixed(int dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be >= 1");
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const CMatrix diff = rho.matrix() - sigma.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (diff + diff.adjoint()),
                                                Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double schatten_norm(const CMatrix& t, double p) {
  if (t.rows() != t.cols()) throw std::invalid_argument("schatten_norm: square matrix required");
  Eigen::JacobiSVD<CMatrix> svd(t);
  const auto& s = svd.singularValues();
  if (p == 1.0) return s.sum();
  if (p == 2.0) return std::sqrt(s.squaredNorm());
  if (p == std::numeric_limits<double>::infinity()) return s.maxCoeff();
  throw std::invalid_argument("schatten_norm: p must be 1, 2 or inf");
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

DensityMatrix conjugate(const DensityMatrix& rho, const UnitaryMatrix& u) {
  if (rho.dim() != u.dim()) throw std::invalid_argument("conjugate: dimension mismatch");
  return DensityMatrix(u.matrix() * rho.matrix() * u.matrix().adjoint(), rho.bipartite());
}

DensityMatrix product_pure_density(const PureProductState& s) {
  const CVector v = s.joint();
  return DensityMatrix(v * v.adjoint(), std::pair{s.local_dim(), s.local_dim()});
}

}  // namespace cpsep
