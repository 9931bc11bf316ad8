#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cpsep/density_matrix.hpp"
#include "cpsep/haar.hpp"
#include "cpsep/spectral_instance.hpp"

using namespace cpsep;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DensityMatrix random_state(int dim, RandomStream& rng) {
  CMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = Cplx(rng.next_gaussian(), rng.next_gaussian());
  }
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

CVector basis_vector(int dim, int k) {
  CVector v = CVector::Zero(dim);
  v[k] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("maximally mixed state") {
  const DensityMatrix mm = maximally_mixed(4);
  for (int i = 0; i < 4; ++i) CHECK(mm.matrix()(i, i) == Cplx(0.25, 0.0));
  CHECK(trace_distance(mm, mm) == doctest::Approx(0.0).epsilon(1e-15));

  // I/d^2 is the product of its local halves.
  const int d = 3;
  const CMatrix local = CMatrix::Identity(d, d) / static_cast<double>(d);
  CMatrix joint = CMatrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) joint(a * d + b, c * d + e) = local(a, c) * local(b, e);
  CHECK((joint - maximally_mixed(d * d).matrix()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("density matrix validation") {
  CMatrix bad_trace = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{CMatrix(bad_trace)}, std::invalid_argument);

  CMatrix not_herm(2, 2);
  not_herm << Cplx(0.5, 0), Cplx(0.1, 0.2), Cplx(0.1, -0.1), Cplx(0.5, 0);
  CHECK_THROWS_AS(DensityMatrix{CMatrix(not_herm)}, std::invalid_argument);

  CMatrix indefinite(2, 2);
  indefinite << Cplx(1.5, 0), Cplx(0, 0), Cplx(0, 0), Cplx(-0.5, 0);
  CHECK_THROWS_AS(DensityMatrix{CMatrix(indefinite)}, std::invalid_argument);
}

TEST_CASE("trace distance") {
  const DensityMatrix a = product_pure_density(
      PureProductState(basis_vector(2, 0), basis_vector(2, 0)));
  const DensityMatrix b = product_pure_density(
      PureProductState(basis_vector(2, 1), basis_vector(2, 1)));
  CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(trace_distance(a, maximally_mixed(2)), std::invalid_argument);
}

TEST_CASE("trace distance is a unitarily invariant metric") {
  RandomStream rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    RandomStream s = rng.substream(trial);
    const DensityMatrix x = random_state(6, s);
    const DensityMatrix y = random_state(6, s);
    const DensityMatrix z = random_state(6, s);
    const double xy = trace_distance(x, y);
    CHECK(xy == doctest::Approx(trace_distance(y, x)).epsilon(1e-12));
    CHECK(xy <= trace_distance(x, z) + trace_distance(z, y) + 1e-10);
    CHECK(xy >= 0.0);
    CHECK(xy <= 1.0 + 1e-12);

    const UnitaryMatrix u = haar_unitary(6, s);
    CHECK(trace_distance(conjugate(x, u), conjugate(y, u)) ==
          doctest::Approx(xy).epsilon(1e-10));
  }
}

TEST_CASE("schatten norms") {
  CHECK(schatten_norm(CMatrix::Identity(4, 4), kInf) == doctest::Approx(1.0).epsilon(1e-12));

  CMatrix traceless(2, 2);
  traceless << Cplx(1, 0), Cplx(0, 0), Cplx(0, 0), Cplx(-1, 0);
  CHECK(schatten_norm(traceless, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(schatten_norm(traceless, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(schatten_norm(traceless, 3.0), std::invalid_argument);
}

TEST_CASE("measurement outcome probabilities form a distribution") {
  RandomStream rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    RandomStream s = rng.substream(trial);
    const DensityMatrix rho = random_state(5, s);
    // Two-outcome measurement {E0, E1 = I - E0} with E0 = G G+ scaled into [0, I].
    CMatrix g(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) g(i, j) = Cplx(s.next_gaussian(), s.next_gaussian());
    CMatrix e0 = g * g.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(e0);
    e0 /= (solver.eigenvalues().maxCoeff() * 1.01);
    const CMatrix e1 = CMatrix::Identity(5, 5) - e0;

    const double p0 = (rho.matrix() * e0).trace().real();
    const double p1 = (rho.matrix() * e1).trace().real();
    CHECK(p0 >= -1e-10);
    CHECK(p1 >= -1e-10);
    CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("haar unitaries are unitary") {
  RandomStream rng(63);
  for (int trial = 0; trial < 50; ++trial) {
    RandomStream s = rng.substream(trial);
    const UnitaryMatrix u = haar_unitary(16, s);
    const CMatrix defect =
        u.matrix().adjoint() * u.matrix() - CMatrix::Identity(16, 16);
    CHECK(defect.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("haar moment: E|U_00|^2 = 1/dim") {
  RandomStream rng(64);
  const int trials = 100000;
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    RandomStream s = rng.substream(t);
    acc += std::norm(haar_unitary(4, s).matrix()(0, 0));
  }
  CHECK(acc / trials == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("phase fix matters: raw QR fails the first-moment test") {
  // The raw Householder Q absorbs a data-dependent phase, forcing
  // Re(Q_00) < 0 every draw; the phase-fixed version is mean-zero.
  RandomStream rng(65);
  const int trials = 4000;
  double fixed_mean = 0.0;
  double naive_mean = 0.0;
  for (int t = 0; t < trials; ++t) {
    RandomStream s1 = rng.substream(2 * t);
    RandomStream s2 = rng.substream(2 * t + 1);
    fixed_mean += haar_unitary(8, s1).matrix()(0, 0).real();
    naive_mean += naive_qr_unitary(8, s2)(0, 0).real();
  }
  fixed_mean /= trials;
  naive_mean /= trials;
  // Per-draw std is about 1/sqrt(2*8); 4 sigma of the Monte Carlo mean.
  const double four_sigma = 4.0 * (1.0 / std::sqrt(16.0)) / std::sqrt(trials);
  CHECK(std::abs(fixed_mean) <= four_sigma);
  CHECK(naive_mean < -0.1);
}

TEST_CASE("haar invariance under fixed left multiplication") {
  // Kolmogorov-Smirnov on |U_00| samples: V U vs U at alpha = 0.01.
  RandomStream rng(66);
  RandomStream vs(67);
  const UnitaryMatrix v = haar_unitary(4, vs);
  const int trials = 4000;
  std::vector<double> plain;
  std::vector<double> rotated;
  for (int t = 0; t < trials; ++t) {
    RandomStream s1 = rng.substream(2 * t);
    RandomStream s2 = rng.substream(2 * t + 1);
    plain.push_back(std::abs(haar_unitary(4, s1).matrix()(0, 0)));
    rotated.push_back(std::abs((v.matrix() * haar_unitary(4, s2).matrix())(0, 0)));
  }
  std::sort(plain.begin(), plain.end());
  std::sort(rotated.begin(), rotated.end());
  double ks = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    while (j < rotated.size() && rotated[j] <= plain[i]) ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / plain.size() -
                               static_cast<double>(j) / rotated.size()));
  }
  // Two-sample KS critical value at alpha = 0.01.
  const double critical = 1.63 * std::sqrt(2.0 / trials);
  CHECK(ks <= critical);
}

TEST_CASE("conjugation preserves trace and spectrum") {
  RandomStream rng(68);
  const DensityMatrix rho = random_state(36, rng);
  const UnitaryMatrix id(CMatrix::Identity(36, 36));
  CHECK((conjugate(rho, id).matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);

  const UnitaryMatrix u = haar_unitary(36, rng);
  const DensityMatrix rotated = conjugate(rho, u);
  CHECK(std::abs(rotated.matrix().trace().real() - 1.0) <= 1e-12);

  Eigen::SelfAdjointEigenSolver<CMatrix> sa(rho.matrix());
  Eigen::SelfAdjointEigenSolver<CMatrix> sb(rotated.matrix());
  CHECK((sa.eigenvalues() - sb.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("pure product states") {
  const PureProductState s(basis_vector(2, 0), basis_vector(2, 0));
  const DensityMatrix rho = product_pure_density(s);
  CHECK(rho.matrix()(0, 0) == Cplx(1.0, 0.0));
  CHECK(rho.matrix()(1, 1) == Cplx(0.0, 0.0));
  CHECK(rho.bipartite().has_value());

  RandomStream rng(69);
  for (int trial = 0; trial < 10; ++trial) {
    RandomStream r = rng.substream(trial);
    const PureProductState t(random_unit_vector(3, r), random_unit_vector(3, r));
    const DensityMatrix pt = product_pure_density(t);
    CHECK(purity(pt) == doctest::Approx(1.0).epsilon(1e-12));

    // Quadratic form through the joint vector matches the dense trace.
    CMatrix g(9, 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) g(i, j) = Cplx(r.next_gaussian(), r.next_gaussian());
    const CMatrix herm = 0.5 * (g + g.adjoint());
    const CVector joint = t.joint();
    const double via_vector = (joint.adjoint() * herm * joint)(0, 0).real();
    const double via_trace = (pt.matrix() * herm).trace().real();
    CHECK(via_vector == doctest::Approx(via_trace).epsilon(1e-10));
  }

  CVector not_unit = basis_vector(2, 0) * 2.0;
  CHECK_THROWS_AS(PureProductState(not_unit, basis_vector(2, 0)), std::invalid_argument);
}

TEST_CASE("density matrix JSON round trip") {
  RandomStream rng(70);
  const DensityMatrix rho = random_state(3, rng);
  const DensityMatrix back = DensityMatrix::from_json(rho.to_json());
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random unit vectors live on the sphere") {
  RandomStream rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    RandomStream s = rng.substream(trial);
    CHECK(std::abs(random_unit_vector(7, s).norm() - 1.0) <= 1e-12);
  }
}
