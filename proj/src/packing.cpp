#include "cpsep/packing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpsep/distances.hpp"

#include <json.hpp>

namespace cpsep {
namespace {

constexpr int kRejectionAttempts = 10000;

void require_quarter(int d) {
  if (d < 4 || d % 4 != 0) {
    throw std::invalid_argument("packing: d must be a multiple of 4");
  }
}

void require_eps_open(double eps) {
  if (!(eps > 0.0) || !(eps < 0.5)) {
    throw std::invalid_argument("packing: eps must lie in (0, 1/2)");
  }
}

}  // namespace

GridDistribution pair_product(int i, int j, int d) {
  if (i < 0 || j < 0 || i >= d || j >= d) {
    throw std::invalid_argument("pair_product: index out of range");
  }
  if (i >= j) throw std::invalid_argument("pair_product: requires i < j");
  GridMatrix m = GridMatrix::Zero(d, d);
  m(i, i) = m(i, j) = m(j, i) = m(j, j) = 0.25;
  return GridDistribution(std::move(m));
}

GridDistribution matched_pair_mixture(PairIndex a, PairIndex b, int bit, double eps, int d) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("matched_pair_mixture: bit must be 0 or 1");
  if (a == b) throw std::invalid_argument("matched_pair_mixture: pairs must be distinct");
  const double heavy = (1.0 + eps) / 2.0;
  const double light = (1.0 - eps) / 2.0;
  const double wa = bit == 0 ? heavy : light;
  const double wb = bit == 0 ? light : heavy;
  GridMatrix m = GridMatrix::Zero(d, d);
  auto add = [&m](PairIndex p, double w) {
    m(p.i, p.i) += w * 0.25;
    m(p.i, p.j) += w * 0.25;
    m(p.j, p.i) += w * 0.25;
    m(p.j, p.j) += w * 0.25;
  };
  add(a, wa);
  add(b, wb);
  return GridDistribution(std::move(m));
}

PackingEnsemble PackingEnsemble::build(int d, double eps, int code_size_target,
                                       RandomStream& rng) {
  require_quarter(d);
  require_eps_open(eps);
  if (code_size_target < 1) throw std::invalid_argument("packing: code size target must be >= 1");

  PackingEnsemble ens;
  ens.d_ = d;
  ens.eps_ = eps;
  ens.code_size_target_ = code_size_target;

  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) ens.pairs_.push_back(PairIndex{i, j});
  }
  const int m = static_cast<int>(ens.pairs_.size()) / 2;
  ens.matching_.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) ens.matching_.emplace_back(k, k + m);

  const double min_distance = 0.4 * m;
  auto admissible_in = [&](const std::vector<Codeword>& code, const Codeword& w) {
    return std::all_of(code.begin(), code.end(), [&](const Codeword& v) {
      return hamming(w, v) >= min_distance;
    });
  };

  RandomStream stream = rng.substream(RandomStream::label_of("packing/code", 0));
  int attempts = 0;
  while (static_cast<int>(ens.code_.size()) < code_size_target && attempts < kRejectionAttempts) {
    Codeword w(static_cast<std::size_t>(m));
    for (auto& bit : w) bit = static_cast<std::uint8_t>(stream.next_u64() & 1);
    ++attempts;
    if (admissible_in(ens.code_, w)) ens.code_.push_back(std::move(w));
  }

  if (static_cast<int>(ens.code_.size()) < code_size_target) {
    // Rejection stalled. Random early picks can strand the code below the
    // achievable size, so the fallback rebuilds greedily from scratch:
    // exhaustive lexicographic scan for small m, a seeded candidate pool
    // otherwise. The larger of the two codes wins.
    std::vector<Codeword> greedy;
    auto consider = [&](Codeword w) {
      if (admissible_in(greedy, w) && std::find(greedy.begin(), greedy.end(), w) == greedy.end()) {
        greedy.push_back(std::move(w));
      }
      return static_cast<int>(greedy.size()) >= code_size_target;
    };
    if (m <= 20) {
      for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        Codeword w(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) w[static_cast<std::size_t>(k)] = (mask >> k) & 1u;
        if (consider(std::move(w))) break;
      }
    } else {
      RandomStream pool = rng.substream(RandomStream::label_of("packing/code-fallback", 0));
      for (int t = 0; t < 4 * kRejectionAttempts; ++t) {
        Codeword w(static_cast<std::size_t>(m));
        for (auto& bit : w) bit = static_cast<std::uint8_t>(pool.next_u64() & 1);
        if (consider(std::move(w))) break;
      }
    }
    if (greedy.size() > ens.code_.size()) ens.code_ = std::move(greedy);
  }
  return ens;
}

std::vector<double> PackingEnsemble::diagonal_deviation(const Codeword& w) const {
  if (static_cast<int>(w.size()) != m()) {
    throw std::invalid_argument("packing: codeword length must equal m");
  }
  // Uncorrected diagonal mass per index: each pair covering i contributes
  // (1/m) * weight * 1/4 at (i, i); deviation is against the 1/(2d) mean.
  std::vector<double> diag(static_cast<std::size_t>(d_), 0.0);
  for (int k = 0; k < m(); ++k) {
    const auto& [ia, ib] = matching_[static_cast<std::size_t>(k)];
    const double heavy = (1.0 + eps_) / 2.0;
    const double light = (1.0 - eps_) / 2.0;
    const double wa = w[static_cast<std::size_t>(k)] == 0 ? heavy : light;
    const double wb = w[static_cast<std::size_t>(k)] == 0 ? light : heavy;
    const PairIndex a = pairs_[static_cast<std::size_t>(ia)];
    const PairIndex b = pairs_[static_cast<std::size_t>(ib)];
    diag[static_cast<std::size_t>(a.i)] += wa * 0.25 / m();
    diag[static_cast<std::size_t>(a.j)] += wa * 0.25 / m();
    diag[static_cast<std::size_t>(b.i)] += wb * 0.25 / m();
    diag[static_cast<std::size_t>(b.j)] += wb * 0.25 / m();
  }
  std::vector<double> delta(static_cast<std::size_t>(d_));
  for (int i = 0; i < d_; ++i) {
    delta[static_cast<std::size_t>(i)] = 2.0 * d_ * diag[static_cast<std::size_t>(i)] - 1.0;
  }
  return delta;
}

GridDistribution PackingEnsemble::distribution(const Codeword& w) const {
  const std::vector<double> delta = diagonal_deviation(w);
  double delta_sum = 0.0;
  for (double v : delta) {
    if (std::abs(v) > eps_ + 1e-12) {
      throw std::logic_error("packing: diagonal deviation escaped [-eps, eps]");
    }
    delta_sum += v;
  }
  if (std::abs(delta_sum) > 1e-9) {
    throw std::logic_error("packing: diagonal deviations must sum to zero");
  }

  GridMatrix mat = GridMatrix::Zero(d_, d_);
  // Off-diagonal cells carry (1 +- eps) / (16 m) depending on the codeword.
  for (int k = 0; k < m(); ++k) {
    const auto& [ia, ib] = matching_[static_cast<std::size_t>(k)];
    const PairIndex a = pairs_[static_cast<std::size_t>(ia)];
    const PairIndex b = pairs_[static_cast<std::size_t>(ib)];
    const double heavy = (1.0 + eps_) / (16.0 * m());
    const double light = (1.0 - eps_) / (16.0 * m());
    const double va = w[static_cast<std::size_t>(k)] == 0 ? heavy : light;
    const double vb = w[static_cast<std::size_t>(k)] == 0 ? light : heavy;
    mat(a.i, a.j) = mat(a.j, a.i) = va;
    mat(b.i, b.j) = mat(b.j, b.i) = vb;
  }
  const double diag_value = 3.0 / (4.0 * d_);
  for (int i = 0; i < d_; ++i) mat(i, i) = diag_value;
  // Every cell is a closed form; keep them verbatim instead of letting
  // construction renormalize away the exact diagonal.
  return GridDistribution::trusted(std::move(mat));
}

MixtureOfProducts PackingEnsemble::explicit_mixture(const Codeword& w) const {
  const std::vector<double> delta = diagonal_deviation(w);
  std::vector<std::pair<double, Eigen::VectorXd>> raw;
  for (int k = 0; k < m(); ++k) {
    const auto& [ia, ib] = matching_[static_cast<std::size_t>(k)];
    const double heavy = (1.0 + eps_) / 2.0;
    const double light = (1.0 - eps_) / 2.0;
    const double wa = w[static_cast<std::size_t>(k)] == 0 ? heavy : light;
    const double wb = w[static_cast<std::size_t>(k)] == 0 ? light : heavy;
    for (const auto& [pair_idx, weight] :
         {std::pair{ia, wa}, std::pair{ib, wb}}) {
      const PairIndex p = pairs_[static_cast<std::size_t>(pair_idx)];
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d_);
      v[p.i] = 0.5;
      v[p.j] = 0.5;
      raw.emplace_back(0.5 * weight / m(), std::move(v));
    }
  }
  for (int i = 0; i < d_; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d_);
    v[i] = 1.0;
    const double u = (1.0 - delta[static_cast<std::size_t>(i)] / 2.0) / d_;
    raw.emplace_back(0.5 * u, std::move(v));
  }
  return normalize_mixture(raw);
}

int PackingEnsemble::hamming(const Codeword& w, const Codeword& v) {
  if (w.size() != v.size()) throw std::invalid_argument("hamming: length mismatch");
  int dist = 0;
  for (std::size_t k = 0; k < w.size(); ++k) dist += w[k] != v[k];
  return dist;
}

double PackingEnsemble::tv_closed_form(const Codeword& w, const Codeword& v) const {
  return hamming(w, v) * eps_ / (4.0 * m());
}

double PackingEnsemble::kl_closed_form(const Codeword& w, const Codeword& v) const {
  return hamming(w, v) / (4.0 * m()) * eps_ * std::log((1.0 + eps_) / (1.0 - eps_));
}

std::string PackingEnsemble::to_json(bool include_distributions) const {
  nlohmann::json j;
  j["d"] = d_;
  j["eps"] = eps_;
  j["m"] = m();
  j["code_size_target"] = code_size_target_;
  auto pairs = nlohmann::json::array();
  for (const PairIndex& p : pairs_) pairs.push_back({p.i + 1, p.j + 1});
  j["pairs"] = std::move(pairs);
  auto matching = nlohmann::json::array();
  for (const auto& [a, b] : matching_) matching.push_back({a, b});
  j["matching"] = std::move(matching);
  auto code = nlohmann::json::array();
  for (const Codeword& w : code_) {
    std::string bits(w.size(), '0');
    for (std::size_t k = 0; k < w.size(); ++k) bits[k] = w[k] ? '1' : '0';
    code.push_back(bits);
  }
  j["code"] = std::move(code);
  if (include_distributions) {
    auto dists = nlohmann::json::array();
    for (const Codeword& w : code_) {
      dists.push_back(nlohmann::json::parse(distribution(w).to_json()));
    }
    j["distributions"] = std::move(dists);
  }
  return j.dump();
}

std::int64_t fano_sample_bound(std::int64_t n_hypotheses, double kl_max, double fail_prob) {
  if (n_hypotheses < 2) throw std::invalid_argument("fano_sample_bound: need N >= 2");
  if (!(kl_max > 0.0)) throw std::invalid_argument("fano_sample_bound: kl_max must be > 0");
  if (!(fail_prob > 0.0) || !(fail_prob < 1.0)) {
    throw std::invalid_argument("fano_sample_bound: fail_prob must lie in (0, 1)");
  }
  const double raw =
      ((1.0 - fail_prob) * std::log(static_cast<double>(n_hypotheses)) - std::log(2.0)) / kl_max;
  if (raw <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(raw));
}

ExperimentReport plugin_learner_experiment(const PackingEnsemble& ensemble,
                                           const std::vector<std::int64_t>& n_grid,
                                           std::int64_t trials, RandomStream& rng) {
  if (trials < 1) throw std::invalid_argument("plugin_learner_experiment: trials must be >= 1");
  const auto& code = ensemble.code();
  if (code.size() < 2) {
    throw std::invalid_argument("plugin_learner_experiment: need at least two codewords");
  }

  std::vector<GridDistribution> members;
  std::vector<CdfSampler> samplers;
  members.reserve(code.size());
  for (const auto& w : code) {
    members.push_back(ensemble.distribution(w));
    samplers.emplace_back(members.back());
  }

  double kl_max = 0.0;
  for (std::size_t a = 0; a < code.size(); ++a) {
    for (std::size_t b = a + 1; b < code.size(); ++b) {
      kl_max = std::max(kl_max, ensemble.kl_closed_form(code[a], code[b]));
    }
  }
  const std::int64_t fano = fano_sample_bound(static_cast<std::int64_t>(code.size()), kl_max, 1.0 / 3.0);

  nlohmann::json config{{"d", ensemble.d()},           {"eps", ensemble.eps()},
                        {"m", ensemble.m()},           {"code_size", code.size()},
                        {"n_grid", n_grid},            {"trials", trials},
                        {"kl_max", kl_max},            {"fano_bound", fano},
                        {"seed", rng.seed()}};
  ExperimentReport report("cp-learning", config,
                          {"n", "mean_tv", "tv_q10", "tv_q50", "tv_q90", "decode_error_rate"});

  const int d = ensemble.d();
  const GridDistribution uniform = uniform_grid(d);
  std::uint64_t streams = 0;

  for (std::size_t row = 0; row < n_grid.size(); ++row) {
    const std::int64_t n = n_grid[row];
    if (n < 0) throw std::invalid_argument("plugin_learner_experiment: n must be >= 0");
    std::vector<double> tv_errors;
    tv_errors.reserve(static_cast<std::size_t>(trials));
    std::int64_t decode_errors = 0;

    for (std::int64_t t = 0; t < trials; ++t) {
      RandomStream stream = rng.substream(RandomStream::label_of(
          "cp-learning/trial", row * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)));
      ++streams;
      const auto truth = static_cast<std::size_t>(stream.next_below(code.size()));

      GridDistribution learned = uniform;
      if (n > 0) {
        GridMatrix counts = GridMatrix::Zero(d, d);
        for (std::int64_t s = 0; s < n; ++s) {
          const GridPoint pt = samplers[truth].draw(stream);
          counts(pt.i, pt.j) += 1.0;
        }
        learned = GridDistribution(counts / static_cast<double>(n));
      }
      tv_errors.push_back(tv_distance(learned, members[truth]));

      std::size_t decoded = 0;
      double best = tv_distance(learned, members[0]);
      for (std::size_t cand = 1; cand < members.size(); ++cand) {
        const double dist = tv_distance(learned, members[cand]);
        if (dist < best) {
          best = dist;
          decoded = cand;
        }
      }
      if (decoded != truth) ++decode_errors;
    }

    std::sort(tv_errors.begin(), tv_errors.end());
    auto quantile = [&](double q) {
      const auto idx = static_cast<std::size_t>(q * static_cast<double>(tv_errors.size() - 1));
      return tv_errors[idx];
    };
    double mean = 0.0;
    for (double v : tv_errors) mean += v;
    mean /= static_cast<double>(tv_errors.size());

    report.add_row({static_cast<std::int64_t>(n), mean, quantile(0.1), quantile(0.5),
                    quantile(0.9),
                    static_cast<double>(decode_errors) / static_cast<double>(trials)});
  }
  report.set_streams_consumed(streams);
  return report;
}

}  // namespace cpsep
