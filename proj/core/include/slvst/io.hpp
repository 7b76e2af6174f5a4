#pragma once

// Deterministic CSV and SVG output.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slvst/config.hpp"
#include "slvst/spectra.hpp"
#include "slvst/tomography.hpp"

namespace slvst {

/// Shortest decimal text that reads back to exactly x.
std::string format_double(double x);

/// Header row, then one row per entry; all columns must have equal length.
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// `freq_mhz,value`.
void write_spectrum_csv(const Spectrum& spec, const std::filesystem::path& file);

/// `energy_mhz,weight`.
void write_wsl_csv(const LadderPeaks& peaks, const std::filesystem::path& file);

/// Matrix file (first row frequencies, first column velocities) and a
/// companion `ladder_id,v_mps,energy_mhz` file.
void write_map_csv(const VstMap& map, const std::filesystem::path& matrix_file,
                   const std::filesystem::path& trajectories_file);

/// Straight line e = e0 + slope * v on the heatmap, MHz and m/s.
struct OverlayLine {
  double e0 = 0.0;
  double slope = 0.0;
};

/// Predicted Wannier-Stark rungs over the velocity range of a map:
/// e = mean band energy + (n + theta / 2 pi) 2 v / lambda per band, with the
/// site-position Zak phase; n v / lambda when the gap is closed.
std::vector<OverlayLine> theory_ladder_lines(const LatticeParams& params, double f_min,
                                             double f_max, double v_max);

struct HeatmapStyle {
  ColorScale scale = ColorScale::kHeat;
  std::vector<OverlayLine> overlay;
  std::string title;
  int width = 640;
  int height = 480;
};

/// SVG 1.1 document: frequency horizontally, velocity vertically, colour
/// linear in value / map maximum.
std::string heatmap_svg(const VstMap& map, const HeatmapStyle& style = {});

void render_heatmap_svg(const VstMap& map, const std::filesystem::path& file,
                        const HeatmapStyle& style = {});

/// Writes text to file, throwing kIo with the path on failure.
void write_text(const std::filesystem::path& file, std::string_view text);

}  // namespace slvst
