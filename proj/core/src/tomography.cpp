#include "slvst/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "slvst/errors.hpp"
#include "slvst/parallel.hpp"
#include "slvst/peaks.hpp"

namespace slvst {
namespace {

constexpr double kSqrtTwoPi = 2.5066282746310002;
constexpr double kHoleWindow = 6.0;  // refinement half-width in hole FWHMs

ThermalDist with_trapezoid_weights(double sigma_v, std::vector<double> nodes) {
  ThermalDist d;
  d.sigma_v = sigma_v;
  d.v_grid = std::move(nodes);
  const std::size_t n = d.v_grid.size();
  d.weights.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = 0.5 * (d.v_grid[i + 1] - d.v_grid[i]);
    d.weights[i] += h;
    d.weights[i + 1] += h;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d.weights[i] *= thermal_weight(d.v_grid[i], d);
    total += d.weights[i];
  }
  for (double& w : d.weights) w /= total;
  return d;
}

void require_resolved(const ThermalDist& dist, const PumpSetting& pump) {
  const std::size_t inside = nodes_in_hole(dist, pump);
  if (inside < kMinNodesPerHole) {
    std::ostringstream os;
    os << "velocity grid has " << inside << " node(s) inside the hole at v0 = " << pump.v0()
       << " m/s (FWHM " << pump.hole_fwhm() << " m/s); need >= " << kMinNodesPerHole;
    throw Error(ErrorCategory::kGridResolution, os.str());
  }
}

std::vector<std::vector<double>> spectra_at(const LatticeParams& params,
                                            std::span<const double> velocities,
                                            const EnsembleOptions& options) {
  std::vector<std::vector<double>> out(velocities.size());
  parallel_for(velocities.size(), [&](std::size_t i) {
    const ChainModel chain =
        build_chain(params, VelocityClass(velocities[i], params.lambda), options.n_sites);
    out[i] = absorption_spectrum(chain, options.grid).value;
  });
  return out;
}

Spectrum weighted_sum(const LatticeParams& params, const ThermalDist& dist,
                      const std::vector<double>& factors, const EnsembleOptions& options,
                      const char* kind) {
  validate(params);
  (void)make_grid(options.grid.min, options.grid.max, options.grid.points);
  const auto spectra = spectra_at(params, dist.v_grid, options);
  Spectrum s;
  s.freq = options.grid.values();
  s.value.assign(options.grid.points, 0.0);
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const double w = dist.weights[i] * factors[i];
    if (w == 0.0) continue;
    for (std::size_t f = 0; f < s.value.size(); ++f) s.value[f] += w * spectra[i][f];
  }
  s.meta.kind = kind;
  s.meta.params = params;
  s.meta.grid = options.grid;
  return s;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ThermalDist make_thermal_dist(double sigma_v, std::size_t n_nodes) {
  if (!std::isfinite(sigma_v) || sigma_v <= 0.0)
    throw Error(ErrorCategory::kValidation, "thermal sigma_v must be > 0");
  if (n_nodes < 3) throw Error(ErrorCategory::kValidation, "thermal grid needs >= 3 nodes");
  std::vector<double> nodes(n_nodes);
  const double lo = -4.0 * sigma_v;
  const double h = 8.0 * sigma_v / static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i) nodes[i] = lo + static_cast<double>(i) * h;
  return with_trapezoid_weights(sigma_v, std::move(nodes));
}

ThermalDist thermal_dist_from_fwhm(double fwhm, std::size_t n_nodes) {
  return make_thermal_dist(fwhm / kFwhmPerSigma, n_nodes);
}

double thermal_weight(double v, const ThermalDist& dist) {
  const double z = v / dist.sigma_v;
  return std::exp(-0.5 * z * z) / (dist.sigma_v * kSqrtTwoPi);
}

PumpSetting::PumpSetting(double delta_pump_mhz, double lambda, double hole_fwhm, double depth)
    : delta_pump_(delta_pump_mhz),
      lambda_(lambda),
      v0_(delta_pump_mhz * kHzPerMHz * lambda),
      hole_fwhm_(hole_fwhm),
      depth_(depth) {
  if (!std::isfinite(delta_pump_mhz))
    throw Error(ErrorCategory::kValidation, "pump detuning must be finite");
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw Error(ErrorCategory::kValidation, "pump wavelength must be > 0");
  if (!std::isfinite(hole_fwhm) || hole_fwhm <= 0.0)
    throw Error(ErrorCategory::kValidation, "hole_fwhm must be > 0");
  if (!std::isfinite(depth) || depth <= 0.0 || depth > 1.0)
    throw Error(ErrorCategory::kValidation, "hole depth must lie in (0, 1]");
}

PumpSetting PumpSetting::at_velocity(double v0, double lambda, double hole_fwhm,
                                     double depth) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw Error(ErrorCategory::kValidation, "pump wavelength must be > 0");
  return PumpSetting(v0 / lambda / kHzPerMHz, lambda, hole_fwhm, depth);
}

double hole_profile(double v, const PumpSetting& pump) {
  const double z = (v - pump.v0()) / (0.5 * pump.hole_fwhm());
  return 1.0 - pump.depth() / (1.0 + z * z);
}

ThermalDist refine_for_hole(const ThermalDist& coarse, const PumpSetting& pump,
                            std::size_t nodes_per_fwhm) {
  if (nodes_per_fwhm < 1) throw Error(ErrorCategory::kValidation, "nodes_per_fwhm must be >= 1");
  const double lo = pump.v0() - kHoleWindow * pump.hole_fwhm();
  const double hi = pump.v0() + kHoleWindow * pump.hole_fwhm();
  std::vector<double> nodes;
  for (double v : coarse.v_grid)
    if (v < lo) nodes.push_back(v);
  const std::size_t intervals = static_cast<std::size_t>(2.0 * kHoleWindow) * nodes_per_fwhm;
  for (std::size_t j = 0; j <= intervals; ++j)
    nodes.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(intervals));
  for (double v : coarse.v_grid)
    if (v > hi) nodes.push_back(v);
  return with_trapezoid_weights(coarse.sigma_v, std::move(nodes));
}

std::size_t nodes_in_hole(const ThermalDist& dist, const PumpSetting& pump) {
  const double half = 0.5 * pump.hole_fwhm();
  // Small slack so that nodes placed exactly on the half-width edges count.
  const double slack = 1e-9 * pump.hole_fwhm();
  return static_cast<std::size_t>(std::count_if(
      dist.v_grid.begin(), dist.v_grid.end(),
      [&](double v) { return std::abs(v - pump.v0()) <= half + slack; }));
}

Spectrum ensemble_spectrum(const LatticeParams& params, const ThermalDist& dist,
                           const std::optional<PumpSetting>& pump,
                           const EnsembleOptions& options) {
  std::vector<double> factors(dist.v_grid.size(), 1.0);
  if (pump) {
    require_resolved(dist, *pump);
    for (std::size_t i = 0; i < factors.size(); ++i)
      factors[i] = hole_profile(dist.v_grid[i], *pump);
  }
  return weighted_sum(params, dist, factors, options, "ensemble");
}

Spectrum difference_spectrum(const LatticeParams& params, const ThermalDist& dist,
                             const PumpSetting& pump, const EnsembleOptions& options) {
  require_resolved(dist, pump);
  // 1 - hole_profile, written out so the subtraction is exact for any depth.
  std::vector<double> factors(dist.v_grid.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double z = (dist.v_grid[i] - pump.v0()) / (0.5 * pump.hole_fwhm());
    factors[i] = pump.depth() / (1.0 + z * z);
  }
  Spectrum s = weighted_sum(params, dist, factors, options, "difference");
  s.meta.velocity = pump.v0();
  return s;
}

VstMap vst_map(const LatticeParams& params, const ThermalDist& dist,
               const PumpSetting& pump_template, std::span<const double> v_scan,
               const VstOptions& options) {
  validate(params);
  const FrequencyGrid& grid = options.ensemble.grid;
  (void)make_grid(grid.min, grid.max, grid.points);
  if (v_scan.empty()) throw Error(ErrorCategory::kValidation, "velocity scan is empty");
  for (std::size_t i = 1; i < v_scan.size(); ++i)
    if (!(v_scan[i] > v_scan[i - 1]))
      throw Error(ErrorCategory::kValidation, "velocity scan must be strictly ascending");

  std::vector<PumpSetting> pumps;
  std::vector<ThermalDist> columns;
  for (double v : v_scan) {
    pumps.push_back(PumpSetting::at_velocity(v, params.lambda, pump_template.hole_fwhm(),
                                             pump_template.depth()));
    columns.push_back(refine_for_hole(dist, pumps.back(), options.nodes_per_fwhm));
    require_resolved(columns.back(), pumps.back());
  }

  // Coarse nodes are shared between columns; evaluate every distinct velocity once.
  std::map<double, std::size_t> slot;
  for (const ThermalDist& c : columns)
    for (double v : c.v_grid) slot.emplace(v, 0);
  std::vector<double> velocities;
  velocities.reserve(slot.size());
  for (auto& [v, index] : slot) {
    index = velocities.size();
    velocities.push_back(v);
  }
  const auto spectra = spectra_at(params, velocities, options.ensemble);

  VstMap map;
  map.v_axis.assign(v_scan.begin(), v_scan.end());
  map.f_axis = grid.values();
  map.data.assign(v_scan.size(), std::vector<double>(grid.points, 0.0));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const ThermalDist& d = columns[c];
    const PumpSetting& pump = pumps[c];
    auto& row = map.data[c];
    for (std::size_t i = 0; i < d.v_grid.size(); ++i) {
      const double z = (d.v_grid[i] - pump.v0()) / (0.5 * pump.hole_fwhm());
      const double w = d.weights[i] * (pump.depth() / (1.0 + z * z));
      if (w == 0.0) continue;
      const auto& a = spectra[slot.at(d.v_grid[i])];
      for (std::size_t f = 0; f < row.size(); ++f) row[f] += w * a[f];
    }
  }
  map.ladders = track_ladder(map, options.min_overlap_fraction, options.prominence);
  return map;
}

VstMap direct_map(const LatticeParams& params, std::span<const double> v_scan,
                  const EnsembleOptions& options, double min_overlap_fraction,
                  double prominence) {
  validate(params);
  if (v_scan.empty()) throw Error(ErrorCategory::kValidation, "velocity scan is empty");
  for (std::size_t i = 1; i < v_scan.size(); ++i)
    if (!(v_scan[i] > v_scan[i - 1]))
      throw Error(ErrorCategory::kValidation, "velocity scan must be strictly ascending");
  VstMap map;
  map.v_axis.assign(v_scan.begin(), v_scan.end());
  map.f_axis = options.grid.values();
  map.data = spectra_at(params, v_scan, options);
  map.ladders = track_ladder(map, min_overlap_fraction, prominence);
  return map;
}

std::vector<Trajectory> track_ladder(const VstMap& map, double min_overlap_fraction,
                                     double min_prominence) {
  const std::size_t columns = map.v_axis.size();
  if (columns < 2 || map.f_axis.size() < 3) return {};
  const double step = map.f_axis[1] - map.f_axis[0];

  std::vector<std::vector<double>> peaks(columns);
  std::vector<double> spacing(columns, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < columns; ++c) {
    const auto& row = map.data[c];
    const double top = *std::max_element(row.begin(), row.end());
    if (!(top > 0.0)) continue;
    for (const Peak& p : find_peaks(map.f_axis, row, min_prominence * top))
      peaks[c].push_back(p.position);
    const LadderPeriod period = ladder_period(peaks[c], 2.0 * step, 0.02);
    if (period.pairs > 0) spacing[c] = period.spacing;
  }
  std::vector<double> known;
  for (double s : spacing)
    if (std::isfinite(s)) known.push_back(s);
  if (known.empty()) return {};
  const double fallback = median_of(known);
  for (double& s : spacing)
    if (!std::isfinite(s)) s = fallback;

  std::vector<Trajectory> all;
  // active[k] = trajectory id owning peak k of the current column.
  std::vector<std::size_t> active;
  for (double e : peaks[0]) {
    active.push_back(all.size());
    all.push_back({{map.v_axis[0], e}});
  }
  for (std::size_t c = 0; c + 1 < columns; ++c) {
    const auto& here = peaks[c];
    const auto& next = peaks[c + 1];
    const double window = kLinkWindowFactor * std::min(spacing[c], spacing[c + 1]);

    struct Link {
      double distance;
      std::size_t from, to;
    };
    std::vector<Link> links;
    for (std::size_t i = 0; i < here.size(); ++i) {
      // Straight-line continuation once a trajectory has two points.
      double expect = here[i];
      const Trajectory& t = all[active[i]];
      if (t.size() >= 2) {
        const LadderPoint& a = t[t.size() - 2];
        const LadderPoint& b = t.back();
        expect = b.e + (b.e - a.e) / (b.v - a.v) * (map.v_axis[c + 1] - b.v);
      }
      for (std::size_t j = 0; j < next.size(); ++j) {
        const double d = std::abs(next[j] - expect);
        if (d < window) links.push_back({d, i, j});
      }
    }
    std::stable_sort(links.begin(), links.end(),
                     [](const Link& a, const Link& b) { return a.distance < b.distance; });

    constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> owner(next.size(), kFree);
    std::vector<bool> used(here.size(), false);
    for (const Link& l : links) {
      if (used[l.from] || owner[l.to] != kFree) continue;
      used[l.from] = true;
      owner[l.to] = active[l.from];
    }
    std::vector<std::size_t> next_active(next.size());
    for (std::size_t j = 0; j < next.size(); ++j) {
      if (owner[j] == kFree) {
        owner[j] = all.size();
        all.emplace_back();
      }
      all[owner[j]].push_back({map.v_axis[c + 1], next[j]});
      next_active[j] = owner[j];
    }
    active = std::move(next_active);
  }

  const double min_points =
      std::max<double>(kMinTrajectoryPoints, min_overlap_fraction * static_cast<double>(columns));
  std::vector<Trajectory> kept;
  for (auto& t : all)
    if (static_cast<double>(t.size()) >= min_points) kept.push_back(std::move(t));
  return kept;
}

}  // namespace slvst
