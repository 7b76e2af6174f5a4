#pragma once

// Two-band superradiance-lattice model: Bloch Hamiltonian over the atomic
// position x and the finite momentum-space chain seen by an atom moving at
// velocity v. Energies are ordinary frequencies in MHz throughout.

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace slvst {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kHzPerMHz = 1.0e6;

/// Rb D1 line; the coupling-laser wavelength used unless configured otherwise.
inline constexpr double kDefaultWavelength = 794.98e-9;
inline constexpr double kDefaultGammaA = 6.0;
inline constexpr double kDefaultGammaB = 0.1;
inline constexpr std::size_t kDefaultChainSites = 201;
inline constexpr double kDegeneracyTolerance = 1e-9;

struct LatticeParams {
  double t1 = 0.0;       ///< MHz
  double t2 = 0.0;       ///< MHz
  double delta = 0.0;    ///< sublattice offset, MHz
  double lambda = kDefaultWavelength;  ///< coupling wavelength, m
  double gamma_a = kDefaultGammaA;     ///< a-sublattice linewidth (FWHM), MHz
  double gamma_b = kDefaultGammaB;     ///< b-sublattice linewidth (FWHM), MHz

  /// Coupling-laser wave number k = 2 pi / lambda in rad/m.
  double wavenumber() const { return kTwoPi / lambda; }

  bool operator==(const LatticeParams&) const = default;
};

/// Throws Error(kValidation) describing the first violated constraint.
void validate(const LatticeParams& params);

LatticeParams make_lattice_params(double t1, double t2, double delta,
                                  double lambda = kDefaultWavelength,
                                  double gamma_a = kDefaultGammaA,
                                  double gamma_b = kDefaultGammaB);

enum class Band { kLower, kUpper };

std::string_view band_name(Band band);

/// Atoms moving at v along the coupling axis. The Doppler tilt per momentum
/// site is v / lambda; a two-site unit cell doubles the ladder spacing.
class VelocityClass {
 public:
  VelocityClass(double v_mps, double lambda);

  double v() const { return v_; }
  double lambda() const { return lambda_; }

  /// Ladder spacing of the gapless single-band lattice, MHz.
  double bloch_freq_single() const { return v_ / lambda_ / kHzPerMHz; }
  /// Ladder spacing of the two-band lattice, MHz.
  double bloch_freq_two_band() const { return 2.0 * bloch_freq_single(); }
  /// Time to cross one wavelength, seconds (infinite at rest).
  double bloch_period() const;

 private:
  double v_;
  double lambda_;
};

enum class Sublattice : std::uint8_t { kA, kB };

/// Finite tight-binding chain over timed-Dicke momentum sites. Site i carries
/// momentum index momentum_index[i]; coupling[i] links sites i and i+1.
struct ChainModel {
  std::vector<int> momentum_index;
  std::vector<double> onsite;
  std::vector<double> coupling;
  std::vector<Sublattice> sublattice;
  std::vector<double> linewidth;
  std::size_t probe_site = 0;
  double velocity = 0.0;  ///< m/s; zero for hand-assembled chains
  double lambda = kDefaultWavelength;

  std::size_t size() const { return onsite.size(); }
};

/// Doppler-tilted chain for one velocity class. Even momentum indices are
/// a-sites (onsite +delta/2), odd ones b-sites (-delta/2); the bond leaving an
/// even site is t1, leaving an odd site t2. Site m = 0 is the probe.
ChainModel build_chain(const LatticeParams& params, const VelocityClass& vel,
                       std::size_t n_sites = kDefaultChainSites);

/// Arbitrary chain (used for analytic checks such as 1- and 3-site chains).
/// All sites are tagged as a-sites with momentum index i - probe_site.
ChainModel make_chain(std::vector<double> onsite, std::vector<double> coupling,
                      std::vector<double> linewidth, std::size_t probe_site);

struct EigenSystem {
  Eigen::VectorXd energies;  ///< ascending, MHz
  Eigen::MatrixXd modes;     ///< column j is the mode of energies[j]
};

/// Hermitian part of the chain as a dense matrix.
Eigen::MatrixXd chain_matrix(const ChainModel& chain);

EigenSystem eigensystem(const ChainModel& chain);

Eigen::Matrix2cd bloch_hamiltonian(const LatticeParams& params, double x);

struct BandPair {
  double lower = 0.0;
  double upper = 0.0;
};

/// E_(-/+) = -/+ sqrt((delta/2)^2 + |t1 e^{ikx} + t2 e^{-ikx}|^2).
BandPair band_energies(const LatticeParams& params, double x);

/// Unit eigenvector with the first component real and non-negative (the
/// second component when the first vanishes). Throws kDegenerate when the gap
/// at x is below tol.
Eigen::Vector2cd band_eigenvector(const LatticeParams& params, double x, Band band,
                                  double tol = kDegeneracyTolerance);

/// eta-parameterized family t1 = A[1 - r sin(pi eta/4)], t2 = A[1 + r sin(pi eta/4)],
/// delta = B cos(pi eta/4) + u. Period 8 in eta.
struct PumpPath {
  double A = 0.0;
  double r = 0.0;
  double B = 0.0;
  double u = 0.0;

  bool operator==(const PumpPath&) const = default;
};

PumpPath make_pump_path(double A, double r, double B, double u);

/// Wavelength and linewidths attached to every member of a PumpPath family.
struct Optics {
  double lambda = kDefaultWavelength;
  double gamma_a = kDefaultGammaA;
  double gamma_b = kDefaultGammaB;

  bool operator==(const Optics&) const = default;
};

LatticeParams h2_params(const PumpPath& path, double eta, const Optics& optics = {});

}  // namespace slvst
