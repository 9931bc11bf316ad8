#include "cpsep/distances.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpsep {
namespace {

void require_same_side(const GridDistribution& p, const GridDistribution& q) {
  if (p.d() != q.d()) throw std::invalid_argument("distance: dimension mismatch");
}

}  // namespace

double l1_distance(const GridDistribution& p, const GridDistribution& q) {
  require_same_side(p, q);
  return (p.matrix() - q.matrix()).cwiseAbs().sum();
}

double tv_distance(const GridDistribution& p, const GridDistribution& q) {
  return 0.5 * l1_distance(p, q);
}

double chi2_distance(const GridDistribution& p, const GridDistribution& q) {
  require_same_side(p, q);
  double acc = 0.0;
  for (int i = 0; i < p.d(); ++i) {
    for (int j = 0; j < p.d(); ++j) {
      const double pv = p.at(i, j);
      const double qv = q.at(i, j);
      if (qv > 0.0) {
        acc += pv * pv / qv;
      } else if (pv > 0.0) {
        return std::numeric_limits<double>::infinity();
      }
    }
  }
  return acc - 1.0;
}

double kl_divergence(const GridDistribution& p, const GridDistribution& q) {
  require_same_side(p, q);
  double acc = 0.0;
  for (int i = 0; i < p.d(); ++i) {
    for (int j = 0; j < p.d(); ++j) {
      const double pv = p.at(i, j);
      if (pv <= 0.0) continue;
      const double qv = q.at(i, j);
      if (qv <= 0.0) return std::numeric_limits<double>::infinity();
      acc += pv * std::log(pv / qv);
    }
  }
  return acc;
}

}  // namespace cpsep
