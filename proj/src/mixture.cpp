#include "cpsep/mixture.hpp"

#include <stdexcept>

namespace cpsep {

MixtureOfProducts normalize_mixture(
    const std::vector<std::pair<double, Eigen::VectorXd>>& raw) {
  if (raw.empty()) throw std::invalid_argument("normalize_mixture: empty component list");
  MixtureOfProducts mix;
  mix.components.reserve(raw.size());
  double total = 0.0;
  const auto d = raw.front().second.size();
  for (const auto& [weight, vec] : raw) {
    if (weight < 0.0) throw std::invalid_argument("normalize_mixture: negative weight");
    if (vec.size() != d) throw std::invalid_argument("normalize_mixture: mixed vector lengths");
    if ((vec.array() < 0.0).any()) {
      throw std::invalid_argument("normalize_mixture: negative vector entry");
    }
    const double norm1 = vec.sum();
    if (norm1 <= 0.0) throw std::invalid_argument("normalize_mixture: zero vector component");
    MixtureOfProducts::Component c;
    c.marginal = vec / norm1;
    c.weight = weight * norm1 * norm1;
    total += c.weight;
    mix.components.push_back(std::move(c));
  }
  if (total <= 0.0) throw std::invalid_argument("normalize_mixture: total weight is zero");
  for (auto& c : mix.components) c.weight /= total;
  return mix;
}

GridDistribution mixture_to_distribution(const MixtureOfProducts& mix) {
  if (mix.components.empty()) {
    throw std::invalid_argument("mixture_to_distribution: empty mixture");
  }
  const int d = mix.d();
  GridMatrix m = GridMatrix::Zero(d, d);
  for (const auto& c : mix.components) {
    m.noalias() += c.weight * (c.marginal * c.marginal.transpose());
  }
  return GridDistribution(std::move(m));
}

}  // namespace cpsep
