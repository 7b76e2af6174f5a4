#pragma once

// Zak phases, Chern numbers and their spectroscopic estimates.

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "slvst/model.hpp"
#include "slvst/tomography.hpp"

namespace slvst {

inline constexpr std::size_t kDefaultZakPoints = 4096;
inline constexpr std::size_t kMinZakPoints = 64;
inline constexpr std::size_t kMinChernGrid = 16;
inline constexpr std::size_t kDefaultChernGrid = 64;
inline constexpr std::size_t kDefaultUnwrapSamples = 64;
inline constexpr std::size_t kMinSlopePoints = 5;
inline constexpr std::size_t kMinSlopeTrajectories = 3;
inline constexpr double kMaxSlopeSpread = 0.5;     ///< rad
inline constexpr double kDefaultMinSlopeGap = 10.0; ///< MHz
inline constexpr double kAmbiguityFraction = 0.1;

/// Origin of the Berry connection.
///
/// kUnitCell places both sublattices of a cell at the same point; the SSH
/// limits are quantized to 0 (t1 > t2) and pi (t1 < t2).
/// kSitePosition places every momentum site at its own position in the
/// chain. This is the phase carried by Wannier-Stark ladder slopes and
/// differs from the unit-cell phase by pi times the band's b-weight.
enum class ZakGauge { kUnitCell, kSitePosition };

enum class ZakMethod { kWilson, kSlope };
enum class ChernMethod { kFhs, kWinding };

std::string_view gauge_name(ZakGauge gauge);
std::string_view method_name(ZakMethod method);
std::string_view method_name(ChernMethod method);

struct ZakResult {
  double theta = 0.0;  ///< (-pi, pi]
  Band band = Band::kLower;
  ZakMethod method = ZakMethod::kWilson;
  double uncertainty = 0.0;
};

struct ChernDiagnostics {
  double max_abs_field = 0.0;  ///< fhs: largest |plaquette field|, rad
  double field_sum = 0.0;      ///< fhs: sum of plaquette fields / 2 pi
  double min_gap = 0.0;        ///< fhs: smallest direct gap on the grid, MHz
  double displacement = 0.0;   ///< winding: signed ladder shift over the loop, MHz
  double spacing = 0.0;        ///< winding: ladder spacing, MHz
  std::vector<double> track;   ///< winding: tracked rung energy per eta, MHz
};

struct ChernResult {
  int c = 0;
  ChernMethod method = ChernMethod::kFhs;
  ChernDiagnostics diagnostics;
};

/// Maps any angle onto (-pi, pi].
double wrap_phase(double theta);

/// -arg of the cyclic overlap product of `states`. With `twisted`, the loop
/// closes on sigma_z |states[0]>, as needed for site-position Bloch vectors.
double wilson_loop_phase(std::span<const Eigen::Vector2cd> states, bool twisted);

/// Band eigenvectors on n_points uniform nodes of x in [0, lambda/2),
/// expressed in the given gauge.
std::vector<Eigen::Vector2cd> bz_states(const LatticeParams& params, Band band,
                                        std::size_t n_points, ZakGauge gauge);

/// Discrete Wilson loop. Uncertainty is |theta(n) - theta(2n)|. Throws
/// kDegenerate if the gap closes at a sample point, kValidation for
/// n_points < 64.
ZakResult zak_wilson(const LatticeParams& params, Band band = Band::kLower,
                     std::size_t n_points = kDefaultZakPoints,
                     ZakGauge gauge = ZakGauge::kUnitCell);

/// Smallest direct gap over the Brillouin zone, MHz.
double min_band_gap(const LatticeParams& params);

/// Least-squares line through one trajectory.
struct LineFit {
  double slope = 0.0;      ///< MHz per m/s
  double intercept = 0.0;  ///< MHz
};
LineFit fit_line(const Trajectory& trajectory);

/// Zak phase from ladder slopes, theta = pi lambda dE/dv (E in MHz, v in m/s)
/// reduced mod 2 pi and circularly averaged. Needs >= 3 trajectories with >= 5
/// points each; throws kInconsistent if any phase deviates from the mean by
/// more than 0.5 rad.
ZakResult zak_from_slope(std::span<const Trajectory> trajectories, double lambda,
                         Band band = Band::kLower);

/// Trajectories long enough for zak_from_slope whose fitted zero-velocity
/// intercept lies on the side of the requested band (lower: < 0). Throws
/// kDegenerate when the lattice gap is below min_gap.
std::vector<Trajectory> select_band_trajectories(std::span<const Trajectory> trajectories,
                                                 const LatticeParams& params, Band band,
                                                 double min_gap = kDefaultMinSlopeGap);

/// Lattice Chern number of the (x, eta) torus [0, lambda/2) x [0, 8).
/// Throws kDegenerate if the gap closes on the grid, kGridResolution if the
/// field sum misses an integer by more than 1e-6.
ChernResult chern_fhs(const PumpPath& path, std::size_t nx = kDefaultChernGrid,
                      std::size_t neta = kDefaultChernGrid, Band band = Band::kLower,
                      const Optics& optics = {});

/// Plaquette-field sum over eta in [eta1, eta2] (n_eta steps, nx x-nodes).
/// Equals the unwrapped change of the unit-cell Zak phase across the strip.
double strip_curvature(const PumpPath& path, double eta1, double eta2, std::size_t nx,
                       std::size_t n_eta, Band band = Band::kLower, const Optics& optics = {});

ZakResult zak_line(const PumpPath& path, double eta, Band band = Band::kLower,
                   std::size_t n_points = kDefaultZakPoints,
                   ZakGauge gauge = ZakGauge::kUnitCell, const Optics& optics = {});

struct ZakWinding {
  std::vector<double> eta;
  std::vector<double> theta;  ///< unwrapped, theta[0] in (-pi, pi]
  double total = 0.0;         ///< theta.back() - theta.front()
};

/// theta(eta) over one period on n_eta + 1 points, continued onto the nearest
/// branch. Throws kGridResolution if a step exceeds pi/2.
ZakWinding zak_winding(const PumpPath& path, Band band = Band::kLower,
                       std::size_t n_eta = kDefaultUnwrapSamples,
                       std::size_t n_points = kDefaultZakPoints,
                       ZakGauge gauge = ZakGauge::kUnitCell, const Optics& optics = {});

/// Chern number from the shift of the Wannier-Stark ladder across maps taken
/// at successive eta over one period (first and last map are the same
/// Hamiltonian). At the reference velocity (default: largest scanned) the
/// dominant ladder on the band's side of zero detuning is located; its
/// offset is linked between neighbouring maps with wrap-around at half the
/// spacing 2 v / lambda, and C = round(total shift / spacing). Throws
/// kAmbiguous when the shift up and the shift down differ by less than 10%
/// of a spacing, kNoLadder when a map shows no rung in the band.
ChernResult winding_from_wsl(std::span<const VstMap> maps, double lambda,
                             std::optional<double> reference_velocity = std::nullopt,
                             Band band = Band::kLower);

}  // namespace slvst
