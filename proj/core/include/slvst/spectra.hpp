#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slvst/model.hpp"

namespace slvst {

/// Uniform probe-detuning grid, MHz.
struct FrequencyGrid {
  double min = -500.0;
  double max = 500.0;
  std::size_t points = 2001;

  double step() const { return (max - min) / static_cast<double>(points - 1); }
  double at(std::size_t i) const { return min + static_cast<double>(i) * step(); }
  std::vector<double> values() const;

  bool operator==(const FrequencyGrid&) const = default;
};

FrequencyGrid make_grid(double min, double max, std::size_t points);

struct SpectrumMeta {
  std::string kind;                     ///< "dos", "absorption", "ensemble", "difference"
  std::optional<LatticeParams> params;  ///< absent for hand-assembled chains
  std::optional<double> velocity;       ///< m/s, single-velocity spectra only
  FrequencyGrid grid;
};

struct Spectrum {
  std::vector<double> freq;   ///< MHz, ascending and uniform
  std::vector<double> value;  ///< arbitrary units, >= 0
  SpectrumMeta meta;

  /// Trapezoidal integral over the grid.
  double integral() const;
};

inline constexpr double kDefaultDosBroadening = 3.0;
inline constexpr std::size_t kDefaultDosSamples = 10000;
inline constexpr double kDefaultWeightFloor = 1e-4;
inline constexpr double kDefaultProminence = 0.05;

/// Band density of states: both band energies sampled uniformly over
/// x in [0, lambda/2), each sample spread by a unit-area Lorentzian of FWHM
/// `broadening`, the result normalized to unit grid integral.
Spectrum dos(const LatticeParams& params, std::size_t n_x_samples = kDefaultDosSamples,
             double broadening = kDefaultDosBroadening, const FrequencyGrid& grid = {});

struct LadderPeaks {
  std::vector<double> energies;  ///< ascending, MHz
  std::vector<double> weights;   ///< probe-site weight |<probe|mode>|^2
  double spacing_estimate = 0.0; ///< ladder period, MHz (NaN if unresolved)
};

/// Stick spectrum of the tilted chain: eigen-energies whose probe weight
/// exceeds weight_floor. Throws kLaddersUndefined for a chain at rest.
LadderPeaks wsl_levels(const ChainModel& chain, double weight_floor = kDefaultWeightFloor);

/// Probe-site spectral function -Im G(nu) / pi of the chain with complex
/// site energies onsite - i linewidth / 2, evaluated by continued fractions.
Spectrum absorption_spectrum(const ChainModel& chain, const FrequencyGrid& grid = {});

/// Ladder period of a sampled spectrum. Peaks are local maxima with
/// prominence >= min_prominence * max(value). Throws kNoLadder when fewer
/// than two peaks or no consistent period are found.
double ladder_spacing(const Spectrum& spec, double min_prominence = kDefaultProminence);

}  // namespace slvst
