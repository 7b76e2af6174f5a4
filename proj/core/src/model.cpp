#include "slvst/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "slvst/errors.hpp"

namespace slvst {
namespace {

[[noreturn]] void reject(const std::string& what) {
  throw Error(ErrorCategory::kValidation, what);
}

std::string describe(const char* name, double value) {
  std::ostringstream os;
  os << name << " = " << value;
  return os.str();
}

std::complex<double> off_diagonal(const LatticeParams& p, double x) {
  const double phase = p.wavenumber() * x;
  const std::complex<double> e(std::cos(phase), std::sin(phase));
  return p.t1 * e + p.t2 * std::conj(e);
}

}  // namespace

void validate(const LatticeParams& p) {
  if (!std::isfinite(p.t1) || p.t1 < 0.0) reject(describe("t1", p.t1) + " must be >= 0");
  if (!std::isfinite(p.t2) || p.t2 < 0.0) reject(describe("t2", p.t2) + " must be >= 0");
  if (p.t1 == 0.0 && p.t2 == 0.0) reject("t1 and t2 must not both be zero");
  if (!std::isfinite(p.delta)) reject(describe("delta", p.delta) + " must be finite");
  if (!std::isfinite(p.lambda) || p.lambda <= 0.0)
    reject(describe("lambda", p.lambda) + " must be > 0");
  if (!std::isfinite(p.gamma_a) || p.gamma_a <= 0.0)
    reject(describe("gamma_a", p.gamma_a) + " must be > 0");
  if (!std::isfinite(p.gamma_b) || p.gamma_b < 0.0)
    reject(describe("gamma_b", p.gamma_b) + " must be >= 0");
}

LatticeParams make_lattice_params(double t1, double t2, double delta, double lambda,
                                  double gamma_a, double gamma_b) {
  LatticeParams p{t1, t2, delta, lambda, gamma_a, gamma_b};
  validate(p);
  return p;
}

std::string_view band_name(Band band) {
  return band == Band::kLower ? "lower" : "upper";
}

VelocityClass::VelocityClass(double v_mps, double lambda) : v_(v_mps), lambda_(lambda) {
  if (!std::isfinite(v_mps)) reject(describe("v_x", v_mps) + " must be finite");
  if (!std::isfinite(lambda) || lambda <= 0.0)
    reject(describe("lambda", lambda) + " must be > 0");
}

double VelocityClass::bloch_period() const {
  if (v_ == 0.0) return std::numeric_limits<double>::infinity();
  return lambda_ / std::abs(v_);
}

ChainModel build_chain(const LatticeParams& params, const VelocityClass& vel,
                       std::size_t n_sites) {
  validate(params);
  if (n_sites % 2 == 0 || n_sites < 11) {
    std::ostringstream os;
    os << "n_sites = " << n_sites << " must be odd and >= 11";
    reject(os.str());
  }
  const int half = static_cast<int>((n_sites - 1) / 2);
  const double tilt = vel.v() / params.lambda / kHzPerMHz;

  ChainModel chain;
  chain.momentum_index.reserve(n_sites);
  chain.onsite.reserve(n_sites);
  chain.sublattice.reserve(n_sites);
  chain.linewidth.reserve(n_sites);
  chain.coupling.reserve(n_sites - 1);
  for (int m = -half; m <= half; ++m) {
    const bool a_site = (m % 2 == 0);
    chain.momentum_index.push_back(m);
    chain.sublattice.push_back(a_site ? Sublattice::kA : Sublattice::kB);
    chain.onsite.push_back(m * tilt + (a_site ? 0.5 * params.delta : -0.5 * params.delta));
    chain.linewidth.push_back(a_site ? params.gamma_a : params.gamma_b);
    if (m < half) chain.coupling.push_back(a_site ? params.t1 : params.t2);
  }
  chain.probe_site = static_cast<std::size_t>(half);
  chain.velocity = vel.v();
  chain.lambda = params.lambda;
  return chain;
}

ChainModel make_chain(std::vector<double> onsite, std::vector<double> coupling,
                      std::vector<double> linewidth, std::size_t probe_site) {
  const std::size_t n = onsite.size();
  if (n == 0) reject("chain must have at least one site");
  if (coupling.size() + 1 != n) reject("coupling count must equal site count - 1");
  if (linewidth.size() != n) reject("linewidth count must equal site count");
  if (probe_site >= n) reject("probe_site out of range");
  for (double g : linewidth)
    if (!std::isfinite(g) || g < 0.0) reject(describe("linewidth", g) + " must be >= 0");

  ChainModel chain;
  chain.onsite = std::move(onsite);
  chain.coupling = std::move(coupling);
  chain.linewidth = std::move(linewidth);
  chain.sublattice.assign(n, Sublattice::kA);
  chain.momentum_index.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    chain.momentum_index[i] = static_cast<int>(i) - static_cast<int>(probe_site);
  chain.probe_site = probe_site;
  return chain;
}

Eigen::MatrixXd chain_matrix(const ChainModel& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = chain.onsite[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = chain.coupling[static_cast<std::size_t>(i)];
    h(i + 1, i) = chain.coupling[static_cast<std::size_t>(i)];
  }
  return h;
}

EigenSystem eigensystem(const ChainModel& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(chain.onsite.data(), n);
  EigenSystem out;
  if (n == 1) {
    out.energies = diag;
    out.modes = Eigen::MatrixXd::Identity(1, 1);
    return out;
  }
  Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(chain.coupling.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCategory::kNumerical, "tridiagonal eigensolver did not converge");
  out.energies = solver.eigenvalues();
  out.modes = solver.eigenvectors();
  if (!out.energies.allFinite() || !out.modes.allFinite())
    throw Error(ErrorCategory::kNumerical, "eigensolver produced non-finite values");
  return out;
}

Eigen::Matrix2cd bloch_hamiltonian(const LatticeParams& params, double x) {
  const std::complex<double> h = off_diagonal(params, x);
  Eigen::Matrix2cd m;
  m << 0.5 * params.delta, h, std::conj(h), -0.5 * params.delta;
  return m;
}

BandPair band_energies(const LatticeParams& params, double x) {
  const double r = std::hypot(0.5 * params.delta, std::abs(off_diagonal(params, x)));
  return {-r, r};
}

Eigen::Vector2cd band_eigenvector(const LatticeParams& params, double x, Band band,
                                  double tol) {
  const double d = 0.5 * params.delta;
  const std::complex<double> h = off_diagonal(params, x);
  const double r = std::hypot(d, std::abs(h));
  if (2.0 * r < tol) {
    std::ostringstream os;
    os << "band gap " << 2.0 * r << " MHz at x = " << x << " m is below tolerance " << tol;
    throw Error(ErrorCategory::kDegenerate, os.str());
  }
  const double e = band == Band::kLower ? -r : r;
  // Two algebraically equivalent null vectors of (H - e); keep the larger.
  Eigen::Vector2cd v;
  if (std::abs(e - d) >= std::abs(e + d)) {
    v << h, e - d;
  } else {
    v << e + d, std::conj(h);
  }
  v.normalize();
  const std::complex<double> pivot = std::abs(v(0)) >= 1e-12 ? v(0) : v(1);
  v *= std::conj(pivot) / std::abs(pivot);
  if (std::abs(v(0)) >= 1e-12) v(0) = std::abs(v(0));
  else v(1) = std::abs(v(1));
  return v;
}

PumpPath make_pump_path(double A, double r, double B, double u) {
  if (!std::isfinite(A) || A <= 0.0) reject(describe("A", A) + " must be > 0");
  if (!std::isfinite(r) || r < 0.0 || r >= 1.0) reject(describe("r", r) + " must lie in [0, 1)");
  if (!std::isfinite(B)) reject(describe("B", B) + " must be finite");
  if (!std::isfinite(u)) reject(describe("u", u) + " must be finite");
  return {A, r, B, u};
}

LatticeParams h2_params(const PumpPath& path, double eta, const Optics& optics) {
  const double s = std::sin(kPi * eta / 4.0);
  const double c = std::cos(kPi * eta / 4.0);
  LatticeParams p;
  p.t1 = path.A * (1.0 - path.r * s);
  p.t2 = path.A * (1.0 + path.r * s);
  p.delta = path.B * c + path.u;
  p.lambda = optics.lambda;
  p.gamma_a = optics.gamma_a;
  p.gamma_b = optics.gamma_b;
  return p;
}

}  // namespace slvst
