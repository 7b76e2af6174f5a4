#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "slvst/errors.hpp"
#include "slvst/model.hpp"

using namespace slvst;

namespace {

const LatticeParams kFig1 = make_lattice_params(73, 73, 0);
const LatticeParams kFig2 = make_lattice_params(101, 36, -71);

ErrorCategory category_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected slvst::Error");
  return ErrorCategory::kNumerical;
}

// Independent 2x2 diagonalization of the position-space Bloch matrix.
Eigen::Matrix2cd oracle_bloch(const LatticeParams& p, double x) {
  const double kx = 2.0 * oracle::kPi / p.lambda * x;
  const std::complex<double> h = p.t1 * std::polar(1.0, kx) + p.t2 * std::polar(1.0, -kx);
  Eigen::Matrix2cd m;
  m << p.delta / 2, h, std::conj(h), -p.delta / 2;
  return m;
}

}  // namespace

TEST_CASE("lattice params accept the figure parameter sets") {
  const auto a = make_lattice_params(73, 73, 0, 795e-9, 6, 0.1);
  CHECK(a.t1 == 73);
  CHECK(a.wavenumber() == doctest::Approx(2 * oracle::kPi / 795e-9));
  const auto b = make_lattice_params(101, 36, -71, 795e-9, 6, 0.1);
  CHECK(b.delta == -71);
}

TEST_CASE("lattice params reject out-of-domain values") {
  CHECK(category_of([] { make_lattice_params(-1, 36, 0, 795e-9, 6, 0.1); }) ==
        ErrorCategory::kValidation);
  CHECK_THROWS_WITH_AS(make_lattice_params(-1, 36, 0), doctest::Contains("t1"), Error);
  CHECK_THROWS_AS(make_lattice_params(0, 0, 0), Error);
  CHECK_THROWS_WITH_AS(make_lattice_params(1, 1, 0, 0.0), doctest::Contains("lambda"), Error);
  CHECK_THROWS_WITH_AS(make_lattice_params(1, 1, 0, 795e-9, 0.0), doctest::Contains("gamma_a"),
                       Error);
  CHECK_THROWS_AS(make_lattice_params(1, 1, 0, 795e-9, 6, -0.1), Error);
  CHECK_NOTHROW(make_lattice_params(1, 1, 0, 795e-9, 6, 0.0));
}

TEST_CASE("velocity class derived frequencies") {
  const VelocityClass v(100, 795e-9);
  CHECK(v.bloch_freq_two_band() == 2.0 * v.bloch_freq_single());
  CHECK(v.bloch_freq_single() == doctest::Approx(125.786).epsilon(1e-5));
  CHECK(v.bloch_period() == doctest::Approx(795e-9 / 100));
  const VelocityClass rest(0, 795e-9);
  CHECK(rest.bloch_freq_single() == 0.0);
  CHECK(rest.bloch_freq_two_band() == 0.0);
  CHECK(std::isinf(rest.bloch_period()));
  const VelocityClass back(-50, 795e-9);
  CHECK(back.bloch_freq_single() < 0.0);
}

TEST_CASE("bloch hamiltonian analytic points") {
  const auto p = make_lattice_params(40, 40, 0);
  const auto h = bloch_hamiltonian(p, 0.0);
  CHECK(std::abs(h(0, 1) - std::complex<double>(80, 0)) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-80));
  CHECK(es.eigenvalues()(1) == doctest::Approx(80));

  // kx = pi/2 at x = lambda/4
  const auto h2 = bloch_hamiltonian(kFig2, kFig2.lambda / 4.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es2(h2);
  const double expect = std::hypot(71.0 / 2, 101.0 - 36.0);
  CHECK(es2.eigenvalues()(1) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(es2.eigenvalues()(0) == doctest::Approx(-expect).epsilon(1e-12));
}

TEST_CASE("bloch hamiltonian is hermitian and matches the oracle") {
  for (int i = 0; i < 50; ++i) {
    const double x = kFig2.lambda * i / 37.0;
    const auto h = bloch_hamiltonian(kFig2, x);
    CHECK((h - h.adjoint()).norm() == 0.0);
    CHECK((h - oracle_bloch(kFig2, x)).norm() < 1e-12);
    CHECK(h(0, 0).real() == kFig2.delta / 2);
    CHECK(h(1, 1).real() == -kFig2.delta / 2);
  }
}

TEST_CASE("minimum gap of the fig2 lattice from a dense sweep") {
  double gap = std::numeric_limits<double>::infinity();
  double lo = gap, hi = -gap;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double x = 0.5 * kFig2.lambda * i / n;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(oracle_bloch(kFig2, x));
    gap = std::min(gap, es.eigenvalues()(1) - es.eigenvalues()(0));
    const auto e = band_energies(kFig2, x);
    CHECK(e.lower == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
    lo = std::min(lo, e.lower);
    hi = std::max(hi, e.upper);
  }
  CHECK(gap == doctest::Approx(2 * std::hypot(35.5, 65.0)).epsilon(1e-9));
  CHECK(lo == doctest::Approx(-std::hypot(35.5, 137.0)).epsilon(1e-9));
  CHECK(hi == doctest::Approx(std::hypot(35.5, 137.0)).epsilon(1e-9));
}

TEST_CASE("band energies: touching point, edges and dense extrema") {
  const auto touch = band_energies(kFig1, kFig1.lambda / 4);
  CHECK(std::abs(touch.lower) < 1e-9);
  CHECK(std::abs(touch.upper) < 1e-9);
  const auto edge = band_energies(kFig1, 0.0);
  CHECK(edge.lower == doctest::Approx(-146));
  CHECK(edge.upper == doctest::Approx(146));

  double lo = 1e300, hi = -1e300, top_lower = -1e300, bottom_upper = 1e300;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = 0.5 * kFig2.lambda * i / n;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(oracle_bloch(kFig2, x));
    const auto e = band_energies(kFig2, x);
    CHECK(e.lower <= e.upper);
    lo = std::min(lo, es.eigenvalues()(0));
    hi = std::max(hi, e.upper);
    top_lower = std::max(top_lower, e.lower);
    bottom_upper = std::min(bottom_upper, es.eigenvalues()(1));
  }
  CHECK(hi == doctest::Approx(std::hypot(35.5, 137.0)).epsilon(1e-10));
  CHECK(top_lower == doctest::Approx(-std::hypot(35.5, 65.0)).epsilon(1e-10));
  CHECK(bottom_upper == doctest::Approx(std::hypot(35.5, 65.0)).epsilon(1e-10));
  CHECK(lo == doctest::Approx(-std::hypot(35.5, 137.0)).epsilon(1e-10));
}

TEST_CASE("band energies are periodic and chiral") {
  const auto chiral = make_lattice_params(50, 20, 0);
  for (int i = 0; i < 200; ++i) {
    const double x = kFig2.lambda * (i * 0.013 - 1.1);
    const auto a = band_energies(kFig2, x);
    const auto b = band_energies(kFig2, x + kFig2.lambda / 2);
    CHECK(std::abs(a.lower - b.lower) < 1e-10);
    CHECK(std::abs(a.upper - b.upper) < 1e-10);
    const auto c = band_energies(chiral, x);
    CHECK(c.lower == -c.upper);
  }
}

TEST_CASE("band eigenvector single-coupling limit") {
  const auto p = make_lattice_params(30, 0, 0);
  for (double frac : {0.0, 0.1, 0.27, 0.4}) {
    const double x = frac * p.lambda;
    const auto u = band_eigenvector(p, x, Band::kLower);
    const std::complex<double> expect = -std::polar(1.0, -p.wavenumber() * x);
    CHECK(std::abs(u(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(u(1) - expect / std::sqrt(2.0)) < 1e-12);
  }
}

TEST_CASE("band eigenvector at a band touching is degenerate") {
  CHECK(category_of([] { band_eigenvector(kFig1, kFig1.lambda / 4, Band::kLower); }) ==
        ErrorCategory::kDegenerate);
}

TEST_CASE("band eigenvector matches the 2x2 oracle") {
  for (double x : {kFig2.lambda / 8, kFig2.lambda * 0.31, kFig2.lambda * 0.77}) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(oracle_bloch(kFig2, x));
    for (int b = 0; b < 2; ++b) {
      Eigen::Vector2cd ref = es.eigenvectors().col(b);
      ref *= std::polar(1.0, -std::arg(ref(0)));
      const auto u = band_eigenvector(kFig2, x, b == 0 ? Band::kLower : Band::kUpper);
      CHECK((u - ref).norm() < 1e-10);
      CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(u(0).imag() == 0.0);
      CHECK(u(0).real() >= 0.0);
    }
  }
}

TEST_CASE("band eigenvector gauge falls back to the second component") {
  // Vanishing couplings put the lower band entirely on b.
  const auto p = make_lattice_params(1e-13, 1e-13, 10);
  const auto u = band_eigenvector(p, 0.0, Band::kLower);
  CHECK(std::abs(u(0)) < 1e-12);
  CHECK(u(1).imag() == 0.0);
  CHECK(u(1).real() > 0.0);
}

TEST_CASE("untilted uniform chain") {
  const auto c = build_chain(kFig1, VelocityClass(0, kFig1.lambda), 21);
  REQUIRE(c.size() == 21);
  for (double e : c.onsite) CHECK(e == 0.0);
  for (double t : c.coupling) CHECK(t == 73.0);
  CHECK(c.coupling.size() == 20);
}

TEST_CASE("tilted chain has the Doppler step") {
  const auto p = make_lattice_params(73, 73, 0, 795e-9);
  const auto c = build_chain(p, VelocityClass(100, 795e-9), 21);
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    CHECK(c.onsite[i + 1] - c.onsite[i] == doctest::Approx(125.786).epsilon(1e-5));
}

TEST_CASE("fig2 chain alternates and the probe is an a-site at m = 0") {
  const auto c = build_chain(kFig2, VelocityClass(0, kFig2.lambda), 11);
  REQUIRE(c.size() == 11);
  CHECK(c.momentum_index[c.probe_site] == 0);
  CHECK(c.sublattice[c.probe_site] == Sublattice::kA);
  CHECK(c.onsite[c.probe_site] == -35.5);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const bool even = c.momentum_index[i] % 2 == 0;
    CHECK(c.onsite[i] == (even ? -35.5 : 35.5));
    CHECK(c.linewidth[i] == (even ? kFig2.gamma_a : kFig2.gamma_b));
    CHECK(c.momentum_index[i] == static_cast<int>(i) - 5);
  }
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const bool even = c.momentum_index[i] % 2 == 0;
    CHECK(c.coupling[i] == (even ? 101.0 : 36.0));
    if (i + 2 < c.coupling.size()) CHECK(c.coupling[i] == c.coupling[i + 2]);
  }
}

TEST_CASE("chain size constraints") {
  const VelocityClass v(10, kFig2.lambda);
  CHECK(category_of([&] { build_chain(kFig2, v, 20); }) == ErrorCategory::kValidation);
  CHECK(category_of([&] { build_chain(kFig2, v, 9); }) == ErrorCategory::kValidation);
  CHECK_NOTHROW(build_chain(kFig2, v, 11));
}

TEST_CASE("tilt is monotone and linear in velocity") {
  const auto slow = build_chain(kFig2, VelocityClass(40, kFig2.lambda), 31);
  const auto fast = build_chain(kFig2, VelocityClass(80, kFig2.lambda), 31);
  const double f = 40 / kFig2.lambda / 1e6;
  for (std::size_t i = 0; i < slow.size(); ++i) {
    const int m = slow.momentum_index[i];
    CHECK(fast.onsite[i] - slow.onsite[i] == doctest::Approx(m * f).epsilon(1e-12));
  }
  const auto steep = build_chain(kFig1, VelocityClass(80, kFig1.lambda), 31);
  for (std::size_t i = 0; i + 1 < steep.size(); ++i) CHECK(steep.onsite[i + 1] > steep.onsite[i]);
}

TEST_CASE("three-site chain eigenvalues") {
  const double t = 7.5;
  const auto c = make_chain({0, 0, 0}, {t, t}, {1, 1, 1}, 1);
  const auto es = eigensystem(c);
  CHECK(es.energies(0) == doctest::Approx(-std::sqrt(2.0) * t).epsilon(1e-12));
  CHECK(std::abs(es.energies(1)) < 1e-12);
  CHECK(es.energies(2) == doctest::Approx(std::sqrt(2.0) * t).epsilon(1e-12));
}

TEST_CASE("uniform chain spectrum lies within the band") {
  const double t = 50;
  const auto c = build_chain(make_lattice_params(t, t, 0), VelocityClass(0, 1e-6), 21);
  const auto es = eigensystem(c);
  for (Eigen::Index i = 0; i < es.energies.size(); ++i) {
    CHECK(es.energies(i) >= -2 * t);
    CHECK(es.energies(i) <= 2 * t);
  }
}

TEST_CASE("tilted fig1 chain: Sturm oracle and Bloch-frequency spacing") {
  const double v = 200;
  const auto c = build_chain(kFig1, VelocityClass(v, kFig1.lambda), 201);
  const auto es = eigensystem(c);
  const auto ref = oracle::sturm_eigenvalues(c.onsite, c.coupling);
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(es.energies(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(ref[i]).epsilon(1e-10).scale(1e3));
  const double f = v / kFig1.lambda / 1e6;
  for (Eigen::Index i = 50; i < 150; ++i)
    CHECK(es.energies(i + 1) - es.energies(i) == doctest::Approx(f).epsilon(1e-6));
}

TEST_CASE("eigensystem orthonormality, reconstruction and determinism") {
  for (double v : {0.0, 35.0, 250.0}) {
    const auto c = build_chain(kFig2, VelocityClass(v, kFig2.lambda), 201);
    const auto es = eigensystem(c);
    for (Eigen::Index i = 1; i < es.energies.size(); ++i)
      CHECK(es.energies(i) >= es.energies(i - 1));
    const Eigen::MatrixXd gram = es.modes.transpose() * es.modes;
    const double dev = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    CHECK(dev < 1e-10);
    const Eigen::MatrixXd h = chain_matrix(c);
    const Eigen::MatrixXd rebuilt = es.modes * es.energies.asDiagonal() * es.modes.transpose();
    CHECK((rebuilt - h).norm() / h.norm() < 1e-8);
    const auto again = eigensystem(c);
    CHECK(again.energies == es.energies);
    CHECK(again.modes == es.modes);
  }
}

TEST_CASE("eigensystem edge cases") {
  const auto one = eigensystem(make_chain({3.5}, {}, {1}, 0));
  CHECK(one.energies(0) == 3.5);
  CHECK(one.modes(0, 0) == 1.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(category_of([&] { eigensystem(make_chain({0, nan, 0}, {1, 1}, {1, 1, 1}, 1)); }) ==
        ErrorCategory::kNumerical);
}

TEST_CASE("pump path parameters") {
  const auto a = make_pump_path(68, 2.0 / 3.0, 100, 0);
  auto p = h2_params(a, 0);
  CHECK(p.t1 == doctest::Approx(68));
  CHECK(p.t2 == doctest::Approx(68));
  CHECK(p.delta == doctest::Approx(100));
  p = h2_params(a, 2);
  CHECK(p.t1 == doctest::Approx(68.0 / 3.0));
  CHECK(p.t2 == doctest::Approx(68.0 * 5.0 / 3.0));
  CHECK(std::abs(p.delta) < 1e-12);
  const auto b = make_pump_path(68, 2.0 / 3.0, 12.5, 87.5);
  p = h2_params(b, 4);
  CHECK(p.t1 == doctest::Approx(68));
  CHECK(p.t2 == doctest::Approx(68));
  CHECK(p.delta == doctest::Approx(75));
}

TEST_CASE("pump path periodicity and mirror symmetry") {
  const auto path = make_pump_path(90, 0.45, 33, -12);
  for (int i = 0; i < 40; ++i) {
    const double eta = -3.0 + 0.37 * i;
    const auto p = h2_params(path, eta);
    const auto q = h2_params(path, eta + 8);
    CHECK(p.t1 == doctest::Approx(q.t1).epsilon(1e-13));
    CHECK(p.t2 == doctest::Approx(q.t2).epsilon(1e-13));
    CHECK(p.delta == doctest::Approx(q.delta).epsilon(1e-12).scale(100));
    const auto m = h2_params(path, -eta);
    CHECK(p.t1 == doctest::Approx(m.t2).epsilon(1e-13));
    CHECK(p.t1 - path.A == doctest::Approx(-(p.t2 - path.A)).scale(path.A));
  }
}

TEST_CASE("pump path validation") {
  CHECK_THROWS_AS(make_pump_path(0, 0.5, 0, 0), Error);
  CHECK_THROWS_AS(make_pump_path(68, 1.0, 0, 0), Error);
  CHECK_THROWS_AS(make_pump_path(68, -0.1, 0, 0), Error);
}
