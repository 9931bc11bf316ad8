#include "cpsep/hard_instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpsep/hypergeom.hpp"
#include "cpsep/parallel.hpp"

namespace cpsep {
namespace {

void require_even(int d) {
  if (d < 2 || d % 2 != 0) {
    throw std::invalid_argument("subset instance: d must be even (use d - 1 and ignore the last outcome)");
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0) || eps > 0.5) {
    throw std::invalid_argument("subset instance: eps must lie in (0, 1/2]");
  }
}

/// All half-size subsets of [d] as bitmasks, ascending (Gosper's hack).
std::vector<std::uint32_t> half_subsets(int d) {
  std::vector<std::uint32_t> masks;
  const std::uint32_t limit = 1u << d;
  std::uint32_t mask = (1u << (d / 2)) - 1;
  while (mask < limit) {
    masks.push_back(mask);
    const std::uint32_t c = mask & static_cast<std::uint32_t>(-static_cast<std::int32_t>(mask));
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return masks;
}

double phi_of_mask(std::uint32_t mask, int i, int j, double eps) {
  const bool same_side = (((mask >> i) ^ (mask >> j)) & 1u) == 0;
  return same_side ? 1.0 - eps : 1.0 + eps;
}

bool exact_sequences_feasible(int d, std::int64_t n) {
  if (d > kMaxExactSide) return false;
  const double cells = static_cast<double>(d) * d;
  return std::pow(cells, static_cast<double>(n)) <= kMaxExactSequences;
}

}  // namespace

SubsetInstance::SubsetInstance(int d, std::vector<int> subset, double eps)
    : d_(d), eps_(eps), subset_(std::move(subset)) {
  require_even(d_);
  require_eps(eps_);
  member_.assign(static_cast<std::size_t>(d_), 0);
  for (int i : subset_) {
    if (i < 0 || i >= d_) throw std::invalid_argument("subset instance: index out of range");
    if (member_[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument("subset instance: duplicate index");
    }
    member_[static_cast<std::size_t>(i)] = 1;
  }
  if (static_cast<int>(subset_.size()) != d_ / 2) {
    throw std::invalid_argument("subset instance: |S| must equal d/2");
  }
  std::sort(subset_.begin(), subset_.end());
}

SubsetInstance SubsetInstance::first_half(int d, double eps) {
  require_even(d);
  std::vector<int> s(static_cast<std::size_t>(d / 2));
  for (int i = 0; i < d / 2; ++i) s[static_cast<std::size_t>(i)] = i;
  return SubsetInstance(d, std::move(s), eps);
}

SubsetInstance SubsetInstance::random(int d, double eps, RandomStream& rng) {
  require_even(d);
  std::vector<int> all(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) all[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates: the first d/2 entries become S.
  for (int i = 0; i < d / 2; ++i) {
    const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d - i)));
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  all.resize(static_cast<std::size_t>(d / 2));
  return SubsetInstance(d, std::move(all), eps);
}

double SubsetInstance::density(int i, int j) const {
  if (i < 0 || i >= d_ || j < 0 || j >= d_) {
    throw std::invalid_argument("density: point out of range");
  }
  const bool crossing = contains(i) != contains(j);
  return crossing ? 1.0 + eps_ : 1.0 - eps_;
}

double SubsetInstance::density_via_signs(int i, int j) const {
  const double chi_i = contains(i) ? 1.0 : -1.0;
  const double chi_j = contains(j) ? 1.0 : -1.0;
  return 1.0 - chi_i * chi_j * eps_;
}

GridDistribution SubsetInstance::distribution() const {
  const double cells = static_cast<double>(d_) * d_;
  GridMatrix m(d_, d_);
  for (int i = 0; i < d_; ++i) {
    for (int j = 0; j < d_; ++j) m(i, j) = density(i, j) / cells;
  }
  return GridDistribution(std::move(m));
}

std::vector<int> SubsetInstance::indicator_signs() const {
  std::vector<int> x(static_cast<std::size_t>(d_));
  for (int i = 0; i < d_; ++i) x[static_cast<std::size_t>(i)] = contains(i) ? 1 : -1;
  return x;
}

SubsetMixtureSpec::SubsetMixtureSpec(int d_in, double eps_in, std::int64_t n_in)
    : d(d_in), eps(eps_in), n(n_in) {
  require_even(d);
  require_eps(eps);
  if (n < 0) throw std::invalid_argument("mixture spec: n must be >= 0");
}

SampleSeq sample_mixture_sequence(const SubsetMixtureSpec& spec, RandomStream& rng) {
  const SubsetInstance inst = SubsetInstance::random(spec.d, spec.eps, rng);
  return sample(inst.distribution(), static_cast<std::size_t>(spec.n), rng);
}

double mixture_sequence_density(const SubsetMixtureSpec& spec, const SampleSeq& seq) {
  if (static_cast<std::int64_t>(seq.size()) != spec.n) {
    throw std::invalid_argument("mixture_sequence_density: |seq| must equal n");
  }
  if (spec.d > kMaxExactSide) {
    throw infeasible_error("mixture_sequence_density: exact mode requires d <= 16");
  }
  for (const GridPoint& pt : seq.items) {
    if (pt.i < 0 || pt.i >= spec.d || pt.j < 0 || pt.j >= spec.d) {
      throw std::invalid_argument("mixture_sequence_density: point out of range");
    }
  }
  const auto masks = half_subsets(spec.d);
  double acc = 0.0;
  for (std::uint32_t mask : masks) {
    double prod = 1.0;
    for (const GridPoint& pt : seq.items) prod *= phi_of_mask(mask, pt.i, pt.j, spec.eps);
    acc += prod;
  }
  return acc / static_cast<double>(masks.size());
}

double mixture_chi2_exact(const SubsetMixtureSpec& spec) {
  if (spec.d > kMaxExactSide) {
    throw infeasible_error("mixture_chi2_exact: exact mode requires d <= 16");
  }
  // The overlap r of two random half-subsets is hypergeometric, so the
  // pair average collapses to d/2 + 1 closed-form terms.
  const double e2 = spec.eps * spec.eps;
  double acc = 0.0;
  for (int r = 0; r <= spec.d / 2; ++r) {
    const double delta = 4.0 * r / spec.d - 1.0;
    acc += hypergeom_pmf(spec.d, r) *
           std::pow(1.0 + e2 * delta * delta, static_cast<double>(spec.n));
  }
  return acc - 1.0;
}

std::optional<double> mixture_chi2_bound(const SubsetMixtureSpec& spec) {
  if (spec.n == 0) return 0.0;
  const double c = spec.d / (4.0 * static_cast<double>(spec.n) * spec.eps * spec.eps);
  if (c <= 1.0) return std::nullopt;
  return 1.0 / (c - 1.0);
}

std::int64_t sample_complexity_threshold(int d, double eps) {
  require_even(d);
  require_eps(eps);
  return static_cast<std::int64_t>(std::ceil(d / (16.0 * eps * eps)));
}

std::optional<double> mixture_tv_exact(const SubsetMixtureSpec& spec) {
  if (!exact_sequences_feasible(spec.d, spec.n)) return std::nullopt;
  const auto masks = half_subsets(spec.d);
  const int cells = spec.d * spec.d;
  const auto n = static_cast<std::size_t>(spec.n);

  std::vector<GridPoint> seq(n, GridPoint{0, 0});
  std::vector<int> odo(n, 0);
  double total = 0.0;
  std::int64_t count = 1;
  for (std::size_t t = 0; t < n; ++t) count *= cells;
  const double inv_measure = std::pow(static_cast<double>(cells), -static_cast<double>(n));
  for (std::int64_t it = 0; it < count; ++it) {
    double acc = 0.0;
    for (std::uint32_t mask : masks) {
      double prod = 1.0;
      for (std::size_t t = 0; t < n; ++t) prod *= phi_of_mask(mask, seq[t].i, seq[t].j, spec.eps);
      acc += prod;
    }
    const double phi = acc / static_cast<double>(masks.size());
    total += 0.5 * std::abs(phi - 1.0) * inv_measure;
    // Advance the odometer.
    for (std::size_t t = 0; t < n; ++t) {
      if (++odo[t] < cells) {
        seq[t] = GridPoint{odo[t] / spec.d, odo[t] % spec.d};
        break;
      }
      odo[t] = 0;
      seq[t] = GridPoint{0, 0};
    }
  }
  return total;
}

ExperimentReport distinguishing_experiment(int d, double eps,
                                           const std::vector<std::int64_t>& n_grid,
                                           std::int64_t trials, RandomStream& rng) {
  require_even(d);
  require_eps(eps);
  if (trials < 0) throw std::invalid_argument("distinguishing_experiment: trials must be >= 0");

  nlohmann::json config{{"d", d}, {"eps", eps}, {"n_grid", n_grid}, {"trials", trials},
                        {"seed", rng.seed()}};
  ExperimentReport report("cp-hardness", config,
                          {"n", "tv_exact", "advantage_mc", "advantage_stderr", "chi2_exact",
                           "chi2_bound", "tv_ceiling", "threshold"});

  const bool density_feasible = d <= kMaxExactSide;
  if (!density_feasible) {
    report.add_note("d > 16: likelihood-ratio columns omitted, analytic columns only");
  }
  std::uint64_t streams = 0;

  for (std::size_t row = 0; row < n_grid.size(); ++row) {
    const std::int64_t n = n_grid[row];
    const SubsetMixtureSpec spec(d, eps, n);
    using Cell = ExperimentReport::Cell;
    std::vector<Cell> cells(8, Cell{std::monostate{}});
    cells[0] = static_cast<std::int64_t>(n);

    if (const auto tv = mixture_tv_exact(spec)) cells[1] = *tv;

    if (trials > 0 && density_feasible) {
      std::int64_t hits_mixture = 0;
      std::int64_t hits_uniform = 0;
      const GridDistribution uniform = uniform_grid(d);
      for (std::int64_t t = 0; t < trials; ++t) {
        RandomStream sm = rng.substream(
            RandomStream::label_of("cp-hardness/mixture", row * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)));
        RandomStream su = rng.substream(
            RandomStream::label_of("cp-hardness/uniform", row * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)));
        streams += 2;
        const SampleSeq from_mixture = sample_mixture_sequence(spec, sm);
        if (mixture_sequence_density(spec, from_mixture) > 1.0) ++hits_mixture;
        const SampleSeq from_uniform = sample(uniform, static_cast<std::size_t>(n), su);
        if (mixture_sequence_density(spec, from_uniform) > 1.0) ++hits_uniform;
      }
      const double p1 = static_cast<double>(hits_mixture) / static_cast<double>(trials);
      const double p0 = static_cast<double>(hits_uniform) / static_cast<double>(trials);
      cells[2] = p1 - p0;
      cells[3] = std::sqrt((p1 * (1.0 - p1) + p0 * (1.0 - p0)) / static_cast<double>(trials));
    }

    if (density_feasible) cells[4] = mixture_chi2_exact(spec);
    if (const auto bound = mixture_chi2_bound(spec)) {
      cells[5] = *bound;
      cells[6] = std::sqrt(*bound / 2.0);
    }
    cells[7] = sample_complexity_threshold(d, eps);
    report.add_row(std::move(cells));
  }
  report.set_streams_consumed(streams);
  return report;
}

}  // namespace cpsep
