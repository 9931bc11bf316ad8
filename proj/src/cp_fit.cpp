#include "cpsep/cp_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cpsep {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double objective(const MatrixXd& a, const std::vector<MatrixXd>& atoms,
                 const VectorXd& weights) {
  MatrixXd b = MatrixXd::Zero(a.rows(), a.cols());
  for (Eigen::Index k = 0; k < weights.size(); ++k) b += weights[k] * atoms[k];
  return (a - b).cwiseAbs().sum();
}

// Exact minimization of ||R - t * D||_1 over t in [lo, hi]; piecewise
// linear, so the optimum sits at a residual-zero breakpoint or an endpoint.
double exact_line_search(const MatrixXd& r, const MatrixXd& d, double lo, double hi) {
  std::vector<double> candidates{lo, hi};
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      if (d(i, j) != 0.0) {
        const double t = r(i, j) / d(i, j);
        if (t > lo && t < hi) candidates.push_back(t);
      }
    }
  }
  double best_t = lo;
  double best_f = (r - lo * d).cwiseAbs().sum();
  for (double t : candidates) {
    const double f = (r - t * d).cwiseAbs().sum();
    if (f < best_f - 1e-15) {
      best_f = f;
      best_t = t;
    }
  }
  return best_t;
}

// Dense two-phase tableau simplex with Bland's rule. Minimizes cost^T x
// subject to A x = b, x >= 0, where basis[] names an identity basis and
// b >= 0 on entry.
void simplex_solve(MatrixXd& tableau, VectorXd& rhs, const VectorXd& cost,
                   std::vector<int>& basis) {
  const auto m = tableau.rows();
  const auto n = tableau.cols();
  for (int iteration = 0; iteration < 20000; ++iteration) {
    // Reduced costs against the current basis.
    VectorXd dual = VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) dual[i] = cost[basis[static_cast<std::size_t>(i)]];
    int entering = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double reduced = cost[j] - dual.dot(tableau.col(j));
      if (reduced < -1e-11) {
        entering = static_cast<int>(j);
        break;  // Bland: lowest index
      }
    }
    if (entering < 0) return;  // optimal

    int leaving = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double pivot = tableau(i, entering);
      if (pivot > 1e-11) {
        const double ratio = rhs[i] / pivot;
        if (leaving < 0 || ratio < best_ratio - 1e-13 ||
            (ratio < best_ratio + 1e-13 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leaving)])) {
          best_ratio = ratio;
          leaving = static_cast<int>(i);
        }
      }
    }
    if (leaving < 0) return;  // unbounded; cannot happen for this model

    const double pivot = tableau(leaving, entering);
    tableau.row(leaving) /= pivot;
    rhs[leaving] /= pivot;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leaving) continue;
      const double factor = tableau(i, entering);
      if (factor != 0.0) {
        tableau.row(i) -= factor * tableau.row(leaving);
        rhs[i] -= factor * rhs[leaving];
      }
    }
    basis[static_cast<std::size_t>(leaving)] = entering;
  }
}

// Exact weights: minimize ||a - sum_k c_k atoms_k||_1 over the simplex.
// LP formulation: residual split into u - w with u, w >= 0; one artificial
// variable keeps the simplex row feasible through phase 1.
VectorXd l1_weights_exact(const std::vector<MatrixXd>& atoms, const MatrixXd& a) {
  const auto cells = static_cast<Eigen::Index>(a.size());
  const auto k = static_cast<Eigen::Index>(atoms.size());
  const Eigen::Index cols = k + 2 * cells + 1;  // c, u, w, artificial
  const Eigen::Index rows = cells + 1;

  MatrixXd tableau = MatrixXd::Zero(rows, cols);
  VectorXd rhs(rows);
  std::vector<int> basis(static_cast<std::size_t>(rows));

  const double* target = a.data();
  for (Eigen::Index r = 0; r < cells; ++r) {
    const double sign = target[r] >= 0.0 ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      tableau(r, j) = sign * atoms[static_cast<std::size_t>(j)].data()[r];
    }
    tableau(r, k + r) = sign;            // u_r
    tableau(r, k + cells + r) = -sign;   // w_r
    rhs[r] = sign * target[r];
    basis[static_cast<std::size_t>(r)] = static_cast<int>(sign > 0.0 ? k + r : k + cells + r);
  }
  for (Eigen::Index j = 0; j < k; ++j) tableau(cells, j) = 1.0;
  tableau(cells, cols - 1) = 1.0;  // artificial
  rhs[cells] = 1.0;
  basis[static_cast<std::size_t>(cells)] = static_cast<int>(cols - 1);

  VectorXd phase1 = VectorXd::Zero(cols);
  phase1[cols - 1] = 1.0;
  simplex_solve(tableau, rhs, phase1, basis);

  // A degenerate phase 1 can leave the artificial basic at zero; pivot it
  // out so its phase-2 cost cannot distort the duals.
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (basis[static_cast<std::size_t>(i)] != static_cast<int>(cols - 1)) continue;
    for (Eigen::Index j = 0; j < cols - 1; ++j) {
      if (std::abs(tableau(i, j)) > 1e-9) {
        const double pivot = tableau(i, j);
        tableau.row(i) /= pivot;
        rhs[i] /= pivot;
        for (Eigen::Index r = 0; r < rows; ++r) {
          if (r == i) continue;
          const double factor = tableau(r, j);
          if (factor != 0.0) {
            tableau.row(r) -= factor * tableau.row(i);
            rhs[r] -= factor * rhs[i];
          }
        }
        basis[static_cast<std::size_t>(i)] = static_cast<int>(j);
        break;
      }
    }
  }

  VectorXd phase2 = VectorXd::Zero(cols);
  for (Eigen::Index r = 0; r < 2 * cells; ++r) phase2[k + r] = 1.0;
  phase2[cols - 1] = 1e6;  // artificial stays out
  simplex_solve(tableau, rhs, phase2, basis);

  VectorXd weights = VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const int var = basis[static_cast<std::size_t>(i)];
    if (var < k) weights[var] = std::max(0.0, rhs[i]);
  }
  const double total = weights.sum();
  if (total > 0.0) weights /= total;
  return weights;
}

// Symmetric NMF proposals: A ~ H H^T with k nonnegative columns via
// multiplicative updates, columns normalized into marginals. Finds the
// dense factors the sparse candidate families cannot express.
std::vector<VectorXd> symnmf_atoms(const MatrixXd& a, int budget, RandomStream& rng,
                                   std::uint64_t salt) {
  const auto d = a.rows();
  std::vector<VectorXd> out;
  std::uint64_t run = 0;
  for (int k = std::min<int>(budget, static_cast<int>(d));
       k <= std::min<int>(budget, static_cast<int>(2 * d)); ++k) {
    for (int start = 0; start < 2; ++start) {
      RandomStream stream = rng.substream(
          RandomStream::label_of("cp-fit/symnmf", salt * 64 + run++));
      MatrixXd h(d, k);
      for (Eigen::Index i = 0; i < d; ++i) {
        for (int j = 0; j < k; ++j) h(i, j) = 0.05 + stream.next_double();
      }
      h *= std::sqrt(1.0 / (static_cast<double>(d) * k));
      for (int t = 0; t < 12000; ++t) {
        const MatrixXd numer = a * h;
        const MatrixXd denom = h * (h.transpose() * h);
        for (Eigen::Index i = 0; i < d; ++i) {
          for (int j = 0; j < k; ++j) {
            const double den = denom(i, j);
            if (den > 1e-300) {
              h(i, j) *= 0.5 + 0.5 * numer(i, j) / den;
            }
          }
        }
        if (t % 500 == 499 && (a - h * h.transpose()).cwiseAbs().sum() < 1e-13) break;
      }
      for (int j = 0; j < k; ++j) {
        const double norm1 = h.col(j).sum();
        if (norm1 > 1e-12) out.push_back(h.col(j) / norm1);
      }
    }
  }
  return out;
}

// Candidate marginals for the next product term: point masses, pair
// supports at the half split and at the residual-suggested split, and the
// row marginal of the positive residual part.
std::vector<VectorXd> candidate_marginals(const MatrixXd& residual, RandomStream& rng) {
  const auto d = residual.rows();
  const MatrixXd pos = residual.cwiseMax(0.0);
  std::vector<VectorXd> out;

  VectorXd marginal = pos.rowwise().sum() + pos.colwise().sum().transpose();
  if (marginal.sum() > 0.0) {
    out.push_back(marginal / marginal.sum());
  } else {
    out.push_back(VectorXd::Constant(d, 1.0 / static_cast<double>(d)));
  }

  for (Eigen::Index i = 0; i < d; ++i) {
    VectorXd v = VectorXd::Zero(d);
    v[i] = 1.0;
    out.push_back(std::move(v));
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      VectorXd half = VectorXd::Zero(d);
      half[i] = half[j] = 0.5;
      out.push_back(std::move(half));
      const double a = pos(i, i);
      const double b = 0.5 * (pos(i, j) + pos(j, i));
      const double c = pos(j, j);
      const double denom = a + 2.0 * b + c;
      if (denom > 0.0) {
        const double alpha = (a + b) / denom;
        if (alpha > 1e-9 && alpha < 1.0 - 1e-9 && std::abs(alpha - 0.5) > 1e-12) {
          VectorXd v = VectorXd::Zero(d);
          v[i] = alpha;
          v[j] = 1.0 - alpha;
          out.push_back(std::move(v));
        }
      }
    }
  }

  // A couple of random full-support probes guard against blind spots.
  for (int start = 0; start < 2; ++start) {
    RandomStream stream = rng.substream(RandomStream::label_of("cp-fit/probe", start));
    VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = -std::log(1.0 - stream.next_double());
    out.push_back(v / v.sum());
  }
  return out;
}

}  // namespace

CpFitResult cp_distance_upper_bound(const GridDistribution& a, int component_budget,
                                    int iters, RandomStream& rng) {
  if (component_budget < 1) throw std::invalid_argument("cp_distance_upper_bound: k must be >= 1");
  if (iters < 1) throw std::invalid_argument("cp_distance_upper_bound: iters must be >= 1");

  const MatrixXd target = a.matrix();
  const auto d = target.rows();

  std::vector<VectorXd> marginals;
  std::vector<MatrixXd> atoms;
  VectorXd weights;

  auto atom_index = [&](const VectorXd& v) -> int {
    for (std::size_t k = 0; k < marginals.size(); ++k) {
      if ((marginals[k] - v).cwiseAbs().maxCoeff() < 1e-10) return static_cast<int>(k);
    }
    return -1;
  };

  auto mixture_matrix = [&]() {
    MatrixXd b = MatrixXd::Zero(d, d);
    for (Eigen::Index k = 0; k < weights.size(); ++k) b += weights[k] * atoms[k];
    return b;
  };

  double best_f = target.cwiseAbs().sum() + 1.0;
  std::vector<VectorXd> best_marginals;
  VectorXd best_weights;

  auto remember = [&]() {
    const double f = objective(target, atoms, weights);
    if (f < best_f) {
      best_f = f;
      best_marginals = marginals;
      best_weights = weights;
    }
  };

  for (int round = 0; round < iters; ++round) {
    const MatrixXd b = mixture_matrix();
    const MatrixXd residual = target - b;
    const double before = residual.cwiseAbs().sum();
    const std::vector<VectorXd> candidates = candidate_marginals(residual, rng);

    // Cheap pass: best candidate by exact line search along (atom - B).
    VectorXd chosen;
    double chosen_gamma = 0.0;
    double chosen_f = before;
    const bool empty = weights.size() == 0 || weights.sum() == 0.0;
    auto consider = [&](const VectorXd& v) {
      const MatrixXd atom = v * v.transpose();
      const MatrixXd direction = atom - b;
      const double gamma = empty ? 1.0 : exact_line_search(residual, direction, 0.0, 1.0);
      const double f = (residual - gamma * direction).cwiseAbs().sum();
      if (f < chosen_f - 1e-15) {
        chosen_f = f;
        chosen = v;
        chosen_gamma = gamma;
      }
    };
    for (const VectorXd& v : candidates) consider(v);
    for (const VectorXd& v : marginals) consider(v);

    bool lp_applied = false;
    if (chosen.size() > 0) {
      int idx = atom_index(chosen);
      if (idx < 0 && static_cast<int>(marginals.size()) < component_budget) {
        marginals.push_back(chosen);
        atoms.emplace_back(chosen * chosen.transpose());
        VectorXd w(weights.size() + 1);
        if (weights.size() > 0) w.head(weights.size()) = weights;
        w[w.size() - 1] = 0.0;
        weights = std::move(w);
        idx = static_cast<int>(marginals.size()) - 1;
      }
      if (idx >= 0) {
        weights *= (1.0 - chosen_gamma);
        weights[idx] += chosen_gamma;
      }
    } else if (!atoms.empty()) {
      // Line search saw no progress: pool the current atoms with fresh
      // candidates and symmetric-NMF factor proposals, solve the exact LP
      // over the pool, and prune back to the component budget.
      std::vector<VectorXd> pool = marginals;
      auto pool_add = [&](const VectorXd& v) {
        for (const VectorXd& u : pool) {
          if ((u - v).cwiseAbs().maxCoeff() < 1e-10) return;
        }
        pool.push_back(v);
      };
      for (const VectorXd& v : candidates) pool_add(v);
      for (const VectorXd& v :
           symnmf_atoms(target, component_budget, rng, static_cast<std::uint64_t>(round))) {
        pool_add(v);
      }

      std::vector<MatrixXd> pool_atoms;
      pool_atoms.reserve(pool.size());
      for (const VectorXd& v : pool) pool_atoms.emplace_back(v * v.transpose());
      VectorXd w = l1_weights_exact(pool_atoms, target);
      for (;;) {
        int support = 0;
        int smallest = -1;
        for (Eigen::Index k = 0; k < w.size(); ++k) {
          if (w[k] > 1e-14) {
            ++support;
            if (smallest < 0 || w[k] < w[smallest]) smallest = static_cast<int>(k);
          }
        }
        if (support <= component_budget || smallest < 0) break;
        pool.erase(pool.begin() + smallest);
        pool_atoms.erase(pool_atoms.begin() + smallest);
        w = l1_weights_exact(pool_atoms, target);
      }
      if (objective(target, pool_atoms, w) < before - 1e-15) {
        marginals.clear();
        atoms.clear();
        std::vector<double> kept;
        for (std::size_t k = 0; k < pool.size(); ++k) {
          if (w[static_cast<Eigen::Index>(k)] > 1e-14) {
            marginals.push_back(pool[k]);
            atoms.push_back(pool_atoms[k]);
            kept.push_back(w[static_cast<Eigen::Index>(k)]);
          }
        }
        weights = VectorXd(static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k) {
          weights[static_cast<Eigen::Index>(k)] = kept[k];
        }
        weights /= weights.sum();
        lp_applied = true;
      }
    }
    remember();

    // Weight re-optimization: 200 multiplicative simplex updates with a
    // 0.5/(1+t) step decay on the l1 subgradient.
    if (weights.size() > 1) {
      const std::size_t nk = marginals.size();
      VectorXd c = weights.cwiseMax(1e-12);
      c /= c.sum();
      for (int t = 0; t < 200; ++t) {
        MatrixXd bc = MatrixXd::Zero(d, d);
        for (std::size_t k = 0; k < nk; ++k) bc += c[static_cast<Eigen::Index>(k)] * atoms[k];
        const MatrixXd sign = (target - bc).unaryExpr(
            [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
        VectorXd grad(static_cast<Eigen::Index>(nk));
        for (std::size_t k = 0; k < nk; ++k) {
          grad[static_cast<Eigen::Index>(k)] = -(sign.cwiseProduct(atoms[k])).sum();
        }
        const double scale = grad.cwiseAbs().maxCoeff();
        if (scale <= 0.0) break;
        const double eta = 0.5 / (1.0 + t);
        c = c.array() * (-eta * grad.array() / scale).exp();
        c /= c.sum();
        if (objective(target, atoms, c) < objective(target, atoms, weights)) weights = c;
      }
    }
    remember();

    // Exact corrective step: LP weight solve over the current atom set.
    if (!lp_applied && weights.size() > 1) {
      const VectorXd w = l1_weights_exact(atoms, target);
      if (objective(target, atoms, w) < objective(target, atoms, weights)) weights = w;
    }
    remember();
    if (best_f <= 1e-13) break;

    // Free budget held by dead atoms.
    for (std::size_t k = marginals.size(); k-- > 0;) {
      if (weights[static_cast<Eigen::Index>(k)] < 1e-15 && marginals.size() > 1) {
        marginals.erase(marginals.begin() + static_cast<std::ptrdiff_t>(k));
        atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(k));
        VectorXd w(weights.size() - 1);
        Eigen::Index pos = 0;
        for (Eigen::Index kk = 0; kk < weights.size(); ++kk) {
          if (kk != static_cast<Eigen::Index>(k)) w[pos++] = weights[kk];
        }
        weights = std::move(w);
      }
    }
  }

  CpFitResult result;
  result.distance_l1 = best_f;
  std::vector<std::pair<double, VectorXd>> raw;
  for (std::size_t k = 0; k < best_marginals.size(); ++k) {
    if (best_weights[static_cast<Eigen::Index>(k)] > 0.0) {
      raw.emplace_back(best_weights[static_cast<Eigen::Index>(k)], best_marginals[k]);
    }
  }
  result.mixture = normalize_mixture(raw);
  return result;
}

}  // namespace cpsep
