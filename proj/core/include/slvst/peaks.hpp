#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slvst {

struct Peak {
  std::size_t index = 0;  ///< sample index of the local maximum
  double position = 0.0;  ///< parabolic-refined abscissa
  double height = 0.0;
  double prominence = 0.0;
};

/// Local maxima whose topographic prominence is at least min_prominence
/// (absolute units of y). Plateaus report their lowest index. x must be
/// uniformly spaced and the same length as y.
std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y,
                             double min_prominence);

struct LadderPeriod {
  double spacing = 0.0;    ///< median distance of the matched pairs
  std::size_t pairs = 0;   ///< number of (p, p + spacing) pairs found
  double coverage = 0.0;   ///< matched fraction of eligible positions
};

/// Smallest shift d under which the sorted position set maps onto itself:
/// at least min_coverage of the positions p with p + d inside the observed
/// range must have a partner within max(abs_tol, rel_tol * d). Interleaved
/// ladders (two bands) therefore report their common period, not the
/// distance between neighbours of different bands. pairs == 0 means no
/// period was found.
/// How well the shift d maps the sorted positions onto themselves, with the
/// same matching rule as ladder_period.
LadderPeriod shift_match(std::span<const double> sorted_positions, double d, double abs_tol,
                         double rel_tol);

LadderPeriod ladder_period(std::span<const double> positions, double abs_tol,
                           double rel_tol, double min_coverage = 0.75);

}  // namespace slvst
