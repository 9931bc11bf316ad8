#include "cpsep/hypergeom.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace cpsep {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  if (n <= 62) {
    // Exact in integer arithmetic: the running value is always C(m, i).
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
      r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(r);
  }
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double hypergeom_pmf(int d, int r) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("hypergeom_pmf: d must be even and >= 2");
  const int half = d / 2;
  if (r < 0 || r > half) throw std::invalid_argument("hypergeom_pmf: r out of range");
  const double c = binomial(half, r);
  return c * c / binomial(d, half);
}

double hypergeom_exact_tail(int d, int r_min) {
  const int half = d / 2;
  if (r_min < 0) r_min = 0;
  double acc = 0.0;
  for (int r = r_min; r <= half; ++r) acc += hypergeom_pmf(d, r);
  return acc;
}

double hypergeom_tail_bound(double m, double s) {
  if (s < 0.0) throw std::invalid_argument("hypergeom_tail_bound: s must be positive");
  return std::exp(-2.0 * s * s * m);
}

}  // namespace cpsep
