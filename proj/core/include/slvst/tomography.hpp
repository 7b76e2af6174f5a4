#pragma once

// Thermal ensembles, velocity-selective hole burning, and velocity-scanned
// difference maps.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "slvst/model.hpp"
#include "slvst/spectra.hpp"

namespace slvst {

inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)
inline constexpr double kDefaultThermalFwhm = 350.0;
inline constexpr double kDefaultHoleFwhm = 10.0;
inline constexpr std::size_t kDefaultCoarseNodes = 301;
inline constexpr std::size_t kDefaultNodesPerHole = 12;
inline constexpr std::size_t kMinNodesPerHole = 8;

/// One-dimensional Maxwell distribution with its quadrature rule.
/// weights[i] already contain the density, so sum_i weights[i] f(v_i)
/// approximates the thermal average of f.
struct ThermalDist {
  double sigma_v = 0.0;
  std::vector<double> v_grid;   ///< ascending, m/s
  std::vector<double> weights;  ///< sum to 1

  double fwhm() const { return kFwhmPerSigma * sigma_v; }
};

/// Uniform trapezoidal nodes over +/- 4 sigma.
ThermalDist make_thermal_dist(double sigma_v, std::size_t n_nodes = kDefaultCoarseNodes);
ThermalDist thermal_dist_from_fwhm(double fwhm, std::size_t n_nodes = kDefaultCoarseNodes);

/// Gaussian density exp(-v^2 / 2 sigma^2) / (sigma sqrt(2 pi)), s/m.
double thermal_weight(double v, const ThermalDist& dist);

/// Narrow-band bleaching laser. delta_pump is an ordinary frequency in MHz;
/// the burnt velocity class sits at v0 = delta_pump * lambda.
class PumpSetting {
 public:
  PumpSetting(double delta_pump_mhz, double lambda, double hole_fwhm = kDefaultHoleFwhm,
              double depth = 1.0);

  /// Pump tuned onto velocity class v0.
  static PumpSetting at_velocity(double v0, double lambda, double hole_fwhm = kDefaultHoleFwhm,
                                 double depth = 1.0);

  double delta_pump() const { return delta_pump_; }
  double lambda() const { return lambda_; }
  double v0() const { return v0_; }
  double hole_fwhm() const { return hole_fwhm_; }
  double depth() const { return depth_; }

 private:
  double delta_pump_;
  double lambda_;
  double v0_;
  double hole_fwhm_;
  double depth_;
};

/// Fraction of atoms left at velocity v: 1 - depth * L(v), L a unit-peak
/// Lorentzian of FWHM hole_fwhm centred on v0.
double hole_profile(double v, const PumpSetting& pump);

/// Coarse nodes outside v0 +/- 6 hole widths, uniform fine nodes inside.
ThermalDist refine_for_hole(const ThermalDist& coarse, const PumpSetting& pump,
                            std::size_t nodes_per_fwhm = kDefaultNodesPerHole);

/// Number of quadrature nodes inside [v0 - fwhm/2, v0 + fwhm/2].
std::size_t nodes_in_hole(const ThermalDist& dist, const PumpSetting& pump);

struct EnsembleOptions {
  FrequencyGrid grid{};
  std::size_t n_sites = kDefaultChainSites;
};

/// Thermal average of single-velocity absorption spectra, each velocity class
/// weighted by hole_profile when a pump is present. Throws kGridResolution if
/// fewer than 8 nodes fall inside the hole.
Spectrum ensemble_spectrum(const LatticeParams& params, const ThermalDist& dist,
                           const std::optional<PumpSetting>& pump,
                           const EnsembleOptions& options = {});

/// (pump off) - (pump on) on the same quadrature nodes.
Spectrum difference_spectrum(const LatticeParams& params, const ThermalDist& dist,
                             const PumpSetting& pump, const EnsembleOptions& options = {});

struct LadderPoint {
  double v = 0.0;  ///< m/s
  double e = 0.0;  ///< MHz

  bool operator==(const LadderPoint&) const = default;
};

/// One Wannier-Stark rung followed across velocity columns, strictly
/// increasing in v.
using Trajectory = std::vector<LadderPoint>;

struct VstMap {
  std::vector<double> v_axis;  ///< ascending, m/s
  std::vector<double> f_axis;  ///< ascending, MHz
  std::vector<std::vector<double>> data;  ///< data[velocity][frequency]
  std::vector<Trajectory> ladders;        ///< index = ladder id
};

struct VstOptions {
  EnsembleOptions ensemble{};
  std::size_t nodes_per_fwhm = kDefaultNodesPerHole;
  double min_overlap_fraction = 0.0;  ///< forwarded to track_ladder
  double prominence = kDefaultProminence;  ///< forwarded to track_ladder
};

/// One difference spectrum per scan velocity, the pump re-centred on each.
/// `pump_template` supplies hole width and depth; `dist` is the coarse thermal
/// grid that gets refined per column.
VstMap vst_map(const LatticeParams& params, const ThermalDist& dist,
               const PumpSetting& pump_template, std::span<const double> v_scan,
               const VstOptions& options = {});

/// Same layout built from single-velocity absorption spectra (no ensemble),
/// i.e. the ideal limit of a vanishing hole.
VstMap direct_map(const LatticeParams& params, std::span<const double> v_scan,
                  const EnsembleOptions& options = {}, double min_overlap_fraction = 0.0,
                  double prominence = kDefaultProminence);

inline constexpr double kLinkWindowFactor = 0.6;
inline constexpr std::size_t kMinTrajectoryPoints = 3;

/// Links ladder peaks between adjacent velocity columns by nearest energy,
/// within 0.6 x the local ladder spacing. Trajectories with two or more
/// points are compared through their straight-line continuation. Trajectories shorter than three
/// points, or spanning fewer than min_overlap_fraction of the columns, are
/// dropped. Maps with fewer than two columns yield no trajectories.
std::vector<Trajectory> track_ladder(const VstMap& map, double min_overlap_fraction = 0.0,
                                     double min_prominence = kDefaultProminence);

}  // namespace slvst
