#include "slvst/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slvst {

std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y,
                             double min_prominence) {
  if (x.size() != y.size()) throw std::invalid_argument("find_peaks: size mismatch");
  const std::size_t n = y.size();
  std::vector<Peak> peaks;
  if (n < 3) return peaks;
  const double step = x[1] - x[0];

  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y[i] > y[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    if (j + 1 >= n || !(y[j + 1] < y[i])) {
      i = j + 1;
      continue;
    }

    // Prominence: descend to the lowest point before meeting higher ground.
    double left_min = y[i];
    for (std::size_t k = i; k-- > 0;) {
      if (y[k] > y[i]) break;
      left_min = std::min(left_min, y[k]);
    }
    double right_min = y[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      if (y[k] > y[i]) break;
      right_min = std::min(right_min, y[k]);
    }
    const double prominence = y[i] - std::max(left_min, right_min);

    if (prominence >= min_prominence) {
      double offset = 0.0;
      if (i == j) {
        const double curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
        if (curvature < 0.0)
          offset = std::clamp(0.5 * (y[i - 1] - y[i + 1]) / curvature, -0.5, 0.5);
      }
      peaks.push_back({i, x[i] + offset * step, y[i], prominence});
    }
    i = j + 1;
  }
  return peaks;
}

LadderPeriod shift_match(std::span<const double> sorted_positions, double d, double abs_tol,
                         double rel_tol) {
  const auto& p = sorted_positions;
  LadderPeriod out;
  if (p.empty()) return out;
  const double top = p.back();
  const double tol = std::max(abs_tol, rel_tol * d);
  std::size_t eligible = 0;
  std::vector<double> matched;
  for (double q : p) {
    if (q + d > top + tol) break;
    ++eligible;
    const auto it = std::lower_bound(p.begin(), p.end(), q + d - tol);
    if (it != p.end() && *it <= q + d + tol) {
      // Closest partner inside the window.
      auto best = it;
      for (auto jt = it; jt != p.end() && *jt <= q + d + tol; ++jt)
        if (std::abs(*jt - q - d) < std::abs(*best - q - d)) best = jt;
      matched.push_back(*best - q);
    }
  }
  if (matched.empty()) return out;
  std::sort(matched.begin(), matched.end());
  const std::size_t m = matched.size();
  out.spacing = m % 2 == 1 ? matched[m / 2] : 0.5 * (matched[m / 2 - 1] + matched[m / 2]);
  out.pairs = m;
  out.coverage = static_cast<double>(m) / static_cast<double>(eligible);
  return out;
}

LadderPeriod ladder_period(std::span<const double> positions, double abs_tol, double rel_tol,
                           double min_coverage) {
  std::vector<double> p(positions.begin(), positions.end());
  std::sort(p.begin(), p.end());
  LadderPeriod none;
  if (p.size() < 2) return none;

  std::vector<double> candidates;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[b] - p[a] > 2.0 * abs_tol) candidates.push_back(p[b] - p[a]);
  std::sort(candidates.begin(), candidates.end());

  for (double d : candidates) {
    const LadderPeriod match = shift_match(p, d, abs_tol, rel_tol);
    if (match.pairs > 0 && match.coverage + 1e-12 >= min_coverage) return match;
  }
  return none;
}

}  // namespace slvst
