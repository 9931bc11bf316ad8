#include "cpsep/cut_witness.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace cpsep {
namespace {

Eigen::VectorXd to_vector(const std::vector<int>& signs) {
  Eigen::VectorXd x(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) x[static_cast<Eigen::Index>(i)] = signs[i];
  return x;
}

CutWitness make_witness(std::vector<int> signs, double quad) {
  CutWitness w;
  // Canonical orientation: first sign positive (x and -x give the same form).
  if (!signs.empty() && signs.front() < 0) {
    for (int& s : signs) s = -s;
  }
  w.signs = std::move(signs);
  w.quad_form = quad;
  w.cut_weight = 0.5 - 0.5 * quad;
  return w;
}

double quad_form_of(const GridMatrix& sym, const std::vector<int>& signs) {
  const Eigen::VectorXd x = to_vector(signs);
  return x.dot(sym * x);
}

// Steepest single-flip descent to a 1-flip-stable local optimum.
// Flip gains use the symmetrized matrix; ties break on the lowest index.
double descend(const GridMatrix& sym, std::vector<int>& signs) {
  const int d = static_cast<int>(signs.size());
  Eigen::VectorXd x = to_vector(signs);
  Eigen::VectorXd g = sym * x;
  double q = x.dot(g);
  for (;;) {
    int best_i = -1;
    double best_delta = -1e-14;
    for (int i = 0; i < d; ++i) {
      const double delta = -4.0 * x[i] * g[i] + 4.0 * sym(i, i);
      if (delta < best_delta) {
        best_delta = delta;
        best_i = i;
      }
    }
    if (best_i < 0) break;
    x[best_i] = -x[best_i];
    g += 2.0 * x[best_i] * sym.col(best_i);
    q += best_delta;
  }
  for (int i = 0; i < d; ++i) signs[static_cast<std::size_t>(i)] = x[i] > 0 ? 1 : -1;
  return quad_form_of(sym, signs);
}

}  // namespace

std::string CutWitness::to_json() const {
  nlohmann::json j;
  j["x"] = signs;
  j["quad_form"] = quad_form;
  j["cut_weight"] = cut_weight;
  return j.dump();
}

CutWitness CutWitness::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CutWitness w;
  w.signs = j.at("x").get<std::vector<int>>();
  w.quad_form = j.at("quad_form").get<double>();
  w.cut_weight = j.at("cut_weight").get<double>();
  return w;
}

CutWitness cut_value(const GridDistribution& a, const std::vector<int>& signs) {
  if (static_cast<int>(signs.size()) != a.d()) {
    throw std::invalid_argument("cut_value: sign vector length must equal d");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("cut_value: signs must be +-1");
  }
  const Eigen::VectorXd x = to_vector(signs);
  const double quad = x.dot(a.matrix() * x);
  return make_witness(signs, quad);
}

CutWitness best_cut(const GridDistribution& a, BestCutMode mode, RandomStream& rng,
                    int restarts) {
  const int d = a.d();
  const GridMatrix sym = 0.5 * (a.matrix() + a.matrix().transpose());

  if (mode == BestCutMode::exhaustive) {
    if (d > 24) throw std::invalid_argument("best_cut: exhaustive mode requires d <= 24");
    // Gray-code walk over all sign vectors with the last coordinate pinned
    // to +1; each step flips one coordinate and updates g = sym * x in O(d).
    std::vector<int> signs(static_cast<std::size_t>(d), 1);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(d);
    Eigen::VectorXd g = sym * x;
    double q = x.dot(g);
    std::vector<int> best_signs = signs;
    double best_q = q;
    const std::uint64_t steps = d > 1 ? (1ULL << (d - 1)) : 1;
    for (std::uint64_t t = 1; t < steps; ++t) {
      const int i = std::countr_zero(t);
      q += -4.0 * x[i] * g[i] + 4.0 * sym(i, i);
      x[i] = -x[i];
      g += 2.0 * x[i] * sym.col(i);
      if (q < best_q) {
        best_q = q;
        for (int k = 0; k < d; ++k) best_signs[static_cast<std::size_t>(k)] = x[k] > 0 ? 1 : -1;
      }
    }
    return make_witness(best_signs, quad_form_of(sym, best_signs));
  }

  if (restarts < 1) throw std::invalid_argument("best_cut: restarts must be >= 1");
  std::vector<int> best_signs;
  double best_q = 0.0;
  for (int r = 0; r < restarts; ++r) {
    RandomStream stream = rng.substream(RandomStream::label_of("best-cut/restart", r));
    std::vector<int> signs(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) signs[static_cast<std::size_t>(i)] = stream.next_u64() & 1 ? 1 : -1;
    const double q = descend(sym, signs);
    if (best_signs.empty() || q < best_q) {
      best_q = q;
      best_signs = std::move(signs);
    }
  }
  return make_witness(best_signs, best_q);
}

DnnVerdict doubly_nonnegative_check(const GridDistribution& a, double tol) {
  if (tol < 0.0) throw std::invalid_argument("doubly_nonnegative_check: tol must be >= 0");
  DnnVerdict v;
  const GridMatrix& m = a.matrix();

  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    v.violation = DnnVerdict::Violation::symmetry;
    v.measured = asym;
    v.reason = "not symmetric: max |A - A^T| = " + std::to_string(asym);
    return v;
  }
  const double min_entry = m.minCoeff();
  if (min_entry < -tol) {
    v.violation = DnnVerdict::Violation::negative_entry;
    v.measured = min_entry;
    v.reason = "negative entry: min A_ij = " + std::to_string(min_entry);
    return v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -tol) {
    v.violation = DnnVerdict::Violation::not_psd;
    v.measured = min_eig;
    v.reason = "not PSD: min eigenvalue = " + std::to_string(min_eig);
    return v;
  }
  v.pass = true;
  v.measured = min_eig;
  return v;
}

double cp_farness_lower_bound(const GridDistribution& a, const CutWitness& witness) {
  const CutWitness fresh = cut_value(a, witness.signs);
  if (std::abs(fresh.quad_form - witness.quad_form) > 1e-12) {
    throw std::invalid_argument("cp_farness_lower_bound: stale witness (quad_form mismatch)");
  }
  return std::max(0.0, -fresh.quad_form);
}

}  // namespace cpsep
