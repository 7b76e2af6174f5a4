#include "slvst/topology.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "slvst/errors.hpp"
#include "slvst/parallel.hpp"
#include "slvst/peaks.hpp"

namespace slvst {
namespace {

using cd = std::complex<double>;

constexpr double kIntegerTolerance = 1e-6;
constexpr double kLadderTolerance = 0.04;

void require_points(std::size_t n, std::size_t min, const char* what) {
  if (n < min) {
    std::ostringstream os;
    os << what << " = " << n << " is below the minimum " << min;
    throw Error(ErrorCategory::kValidation, os.str());
  }
}

cd unit(cd z) {
  const double a = std::abs(z);
  if (!(a > 0.0) || !std::isfinite(a))
    throw Error(ErrorCategory::kNumerical, "vanishing overlap between neighbouring band states");
  return z / a;
}

cd overlap(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) { return a.dot(b); }

// Unit-cell gauge states on an (eta, x) grid, row-major in eta.
struct TorusStates {
  std::size_t nx = 0;
  std::size_t neta = 0;
  std::vector<Eigen::Vector2cd> u;
  double min_gap = 0.0;

  const Eigen::Vector2cd& at(std::size_t i, std::size_t j) const { return u[j * nx + i]; }
};

TorusStates torus_states(const PumpPath& path, std::span<const double> etas, std::size_t nx,
                         Band band, const Optics& optics) {
  TorusStates t;
  t.nx = nx;
  t.neta = etas.size();
  t.u.resize(nx * etas.size());
  std::vector<double> row_gap(etas.size());
  parallel_for(etas.size(), [&](std::size_t j) {
    const LatticeParams p = h2_params(path, etas[j], optics);
    const auto row = bz_states(p, band, nx, ZakGauge::kUnitCell);
    std::copy(row.begin(), row.end(), t.u.begin() + static_cast<std::ptrdiff_t>(j * nx));
    double g = std::numeric_limits<double>::infinity();
    const double step = 0.5 * p.lambda / static_cast<double>(nx);
    for (std::size_t i = 0; i < nx; ++i)
      g = std::min(g, 2.0 * band_energies(p, static_cast<double>(i) * step).upper);
    row_gap[j] = g;
  });
  t.min_gap = *std::min_element(row_gap.begin(), row_gap.end());
  return t;
}

// Plaquette field of cell (i, j) -> (i+1, j+1); x links first, then eta.
// `jn` is the row index used for eta + d eta.
double plaquette(const TorusStates& t, std::size_t i, std::size_t j, std::size_t jn) {
  const std::size_t in = (i + 1) % t.nx;
  const cd u1 = unit(overlap(t.at(i, j), t.at(in, j)));
  const cd u2 = unit(overlap(t.at(in, j), t.at(in, jn)));
  const cd u3 = unit(overlap(t.at(i, jn), t.at(in, jn)));
  const cd u4 = unit(overlap(t.at(i, j), t.at(i, jn)));
  return std::arg(u1 * u2 * std::conj(u3) * std::conj(u4));
}

double field_sum(const TorusStates& t, bool periodic_eta, double* max_abs) {
  const std::size_t rows = periodic_eta ? t.neta : t.neta - 1;
  std::vector<double> row_sum(rows, 0.0);
  std::vector<double> row_max(rows, 0.0);
  parallel_for(rows, [&](std::size_t j) {
    const std::size_t jn = (j + 1) % t.neta;
    for (std::size_t i = 0; i < t.nx; ++i) {
      const double f = plaquette(t, i, j, jn);
      row_sum[j] += f;
      row_max[j] = std::max(row_max[j], std::abs(f));
    }
  });
  double total = 0.0;
  for (double s : row_sum) total += s;
  if (max_abs) *max_abs = rows ? *std::max_element(row_max.begin(), row_max.end()) : 0.0;
  return total;
}

}  // namespace

std::string_view gauge_name(ZakGauge gauge) {
  return gauge == ZakGauge::kUnitCell ? "unit-cell" : "site-position";
}

std::string_view method_name(ZakMethod method) {
  return method == ZakMethod::kWilson ? "wilson" : "slope";
}

std::string_view method_name(ChernMethod method) {
  return method == ChernMethod::kFhs ? "fhs" : "winding";
}

double wrap_phase(double theta) {
  double r = std::remainder(theta, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double wilson_loop_phase(std::span<const Eigen::Vector2cd> states, bool twisted) {
  if (states.size() < 2) throw Error(ErrorCategory::kValidation, "Wilson loop needs >= 2 states");
  cd product = 1.0;
  for (std::size_t j = 0; j + 1 < states.size(); ++j)
    product *= unit(overlap(states[j], states[j + 1]));
  Eigen::Vector2cd closure = states.front();
  if (twisted) closure(1) = -closure(1);
  product *= unit(overlap(states.back(), closure));
  return wrap_phase(-std::arg(product));
}

std::vector<Eigen::Vector2cd> bz_states(const LatticeParams& params, Band band,
                                        std::size_t n_points, ZakGauge gauge) {
  validate(params);
  std::vector<Eigen::Vector2cd> out(n_points);
  const double step = 0.5 * params.lambda / static_cast<double>(n_points);
  const double k = params.wavenumber();
  for (std::size_t j = 0; j < n_points; ++j) {
    const double x = static_cast<double>(j) * step;
    out[j] = band_eigenvector(params, x, band);
    if (gauge == ZakGauge::kUnitCell) out[j](0) *= std::polar(1.0, -k * x);
  }
  return out;
}

ZakResult zak_wilson(const LatticeParams& params, Band band, std::size_t n_points,
                     ZakGauge gauge) {
  require_points(n_points, kMinZakPoints, "n_points");
  const bool twisted = gauge == ZakGauge::kSitePosition;
  const double coarse = wilson_loop_phase(bz_states(params, band, n_points, gauge), twisted);
  const double fine = wilson_loop_phase(bz_states(params, band, 2 * n_points, gauge), twisted);
  ZakResult r;
  r.theta = fine;
  r.band = band;
  r.method = ZakMethod::kWilson;
  r.uncertainty = std::abs(wrap_phase(fine - coarse));
  return r;
}

double min_band_gap(const LatticeParams& params) {
  return 2.0 * std::hypot(0.5 * params.delta, std::abs(params.t1) - std::abs(params.t2));
}

LineFit fit_line(const Trajectory& trajectory) {
  const std::size_t n = trajectory.size();
  if (n < 2) throw Error(ErrorCategory::kValidation, "line fit needs >= 2 points");
  double mv = 0.0, me = 0.0;
  for (const auto& p : trajectory) {
    mv += p.v;
    me += p.e;
  }
  mv /= static_cast<double>(n);
  me /= static_cast<double>(n);
  double svv = 0.0, sve = 0.0;
  for (const auto& p : trajectory) {
    svv += (p.v - mv) * (p.v - mv);
    sve += (p.v - mv) * (p.e - me);
  }
  if (!(svv > 0.0)) throw Error(ErrorCategory::kDegenerate, "trajectory spans a single velocity");
  LineFit f;
  f.slope = sve / svv;
  f.intercept = me - f.slope * mv;
  return f;
}

ZakResult zak_from_slope(std::span<const Trajectory> trajectories, double lambda, Band band) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw Error(ErrorCategory::kValidation, "wavelength must be > 0");
  if (trajectories.size() < kMinSlopeTrajectories) {
    std::ostringstream os;
    os << "slope extraction needs >= " << kMinSlopeTrajectories << " trajectories, got "
       << trajectories.size();
    throw Error(ErrorCategory::kValidation, os.str());
  }
  std::vector<double> phases;
  for (const auto& t : trajectories) {
    if (t.size() < kMinSlopePoints) {
      std::ostringstream os;
      os << "trajectory with " << t.size() << " points; slope extraction needs >= "
         << kMinSlopePoints;
      throw Error(ErrorCategory::kValidation, os.str());
    }
    phases.push_back(wrap_phase(kPi * lambda * kHzPerMHz * fit_line(t).slope));
  }
  double s = 0.0, c = 0.0;
  for (double p : phases) {
    s += std::sin(p);
    c += std::cos(p);
  }
  const double mean = wrap_phase(std::atan2(s, c));
  double spread = 0.0, sq = 0.0;
  for (double p : phases) {
    const double d = wrap_phase(p - mean);
    spread = std::max(spread, std::abs(d));
    sq += d * d;
  }
  if (spread > kMaxSlopeSpread) {
    std::ostringstream os;
    os << "ladder slopes disagree: phases deviate up to " << spread
       << " rad from their mean (limit " << kMaxSlopeSpread << ")";
    throw Error(ErrorCategory::kInconsistent, os.str());
  }
  const double m = static_cast<double>(phases.size());
  ZakResult r;
  r.theta = mean;
  r.band = band;
  r.method = ZakMethod::kSlope;
  r.uncertainty = std::sqrt(sq / (m - 1.0)) / std::sqrt(m);
  return r;
}

std::vector<Trajectory> select_band_trajectories(std::span<const Trajectory> trajectories,
                                                 const LatticeParams& params, Band band,
                                                 double min_gap) {
  const double gap = min_band_gap(params);
  if (gap < min_gap) {
    std::ostringstream os;
    os << "band gap " << gap << " MHz is below " << min_gap
       << " MHz; ladders cannot be assigned to a band";
    throw Error(ErrorCategory::kDegenerate, os.str());
  }
  std::vector<Trajectory> out;
  for (const auto& t : trajectories) {
    if (t.size() < kMinSlopePoints) continue;
    const double b = fit_line(t).intercept;
    if ((band == Band::kLower && b < 0.0) || (band == Band::kUpper && b > 0.0)) out.push_back(t);
  }
  return out;
}

ChernResult chern_fhs(const PumpPath& path, std::size_t nx, std::size_t neta, Band band,
                      const Optics& optics) {
  require_points(nx, kMinChernGrid, "nx");
  require_points(neta, kMinChernGrid, "neta");
  std::vector<double> etas(neta);
  for (std::size_t j = 0; j < neta; ++j)
    etas[j] = 8.0 * static_cast<double>(j) / static_cast<double>(neta);
  const TorusStates t = torus_states(path, etas, nx, band, optics);
  double max_abs = 0.0;
  const double total = field_sum(t, true, &max_abs) / kTwoPi;
  const double c = std::round(total);
  if (std::abs(total - c) > kIntegerTolerance) {
    std::ostringstream os;
    os << "plaquette field sums to " << total << " x 2pi, not an integer; refine the grid";
    throw Error(ErrorCategory::kGridResolution, os.str());
  }
  ChernResult r;
  r.c = static_cast<int>(c);
  r.method = ChernMethod::kFhs;
  r.diagnostics.max_abs_field = max_abs;
  r.diagnostics.field_sum = total;
  r.diagnostics.min_gap = t.min_gap;
  return r;
}

double strip_curvature(const PumpPath& path, double eta1, double eta2, std::size_t nx,
                       std::size_t n_eta, Band band, const Optics& optics) {
  require_points(nx, kMinChernGrid, "nx");
  require_points(n_eta, 1, "n_eta");
  std::vector<double> etas(n_eta + 1);
  for (std::size_t j = 0; j <= n_eta; ++j)
    etas[j] = eta1 + (eta2 - eta1) * static_cast<double>(j) / static_cast<double>(n_eta);
  const TorusStates t = torus_states(path, etas, nx, band, optics);
  return field_sum(t, false, nullptr);
}

ZakResult zak_line(const PumpPath& path, double eta, Band band, std::size_t n_points,
                   ZakGauge gauge, const Optics& optics) {
  return zak_wilson(h2_params(path, eta, optics), band, n_points, gauge);
}

ZakWinding zak_winding(const PumpPath& path, Band band, std::size_t n_eta,
                       std::size_t n_points, ZakGauge gauge, const Optics& optics) {
  require_points(n_eta, 2, "n_eta");
  ZakWinding w;
  w.eta.resize(n_eta + 1);
  std::vector<double> raw(n_eta + 1);
  for (std::size_t j = 0; j <= n_eta; ++j)
    w.eta[j] = 8.0 * static_cast<double>(j) / static_cast<double>(n_eta);
  parallel_for(n_eta + 1, [&](std::size_t j) {
    raw[j] = zak_line(path, w.eta[j], band, n_points, gauge, optics).theta;
  });
  w.theta.resize(n_eta + 1);
  w.theta[0] = raw[0];
  for (std::size_t j = 1; j <= n_eta; ++j) {
    const double step = wrap_phase(raw[j] - raw[j - 1]);
    if (std::abs(step) > 0.5 * kPi) {
      std::ostringstream os;
      os << "Zak phase jumps by " << step << " rad between eta = " << w.eta[j - 1] << " and "
         << w.eta[j] << "; increase the eta sampling";
      throw Error(ErrorCategory::kGridResolution, os.str());
    }
    w.theta[j] = w.theta[j - 1] + step;
  }
  w.total = w.theta.back() - w.theta.front();
  return w;
}

ChernResult winding_from_wsl(std::span<const VstMap> maps, double lambda,
                             std::optional<double> reference_velocity, Band band) {
  if (maps.size() < 2) throw Error(ErrorCategory::kValidation, "winding needs >= 2 maps");
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw Error(ErrorCategory::kValidation, "wavelength must be > 0");
  const VstMap& first = maps.front();
  if (first.v_axis.empty() || first.f_axis.size() < 3)
    throw Error(ErrorCategory::kValidation, "maps have empty axes");
  for (const auto& m : maps)
    if (m.v_axis != first.v_axis || m.f_axis != first.f_axis ||
        m.data.size() != first.v_axis.size())
      throw Error(ErrorCategory::kValidation, "maps do not share velocity and frequency axes");

  const double v_ref = reference_velocity.value_or(first.v_axis.back());
  const auto hit = std::find_if(first.v_axis.begin(), first.v_axis.end(), [&](double v) {
    return std::abs(v - v_ref) <= 1e-9 * std::max(1.0, std::abs(v_ref));
  });
  if (hit == first.v_axis.end()) {
    std::ostringstream os;
    os << "reference velocity " << v_ref << " m/s is not on the scanned axis";
    throw Error(ErrorCategory::kValidation, os.str());
  }
  if (v_ref == 0.0)
    throw Error(ErrorCategory::kLaddersUndefined, "no ladder at zero reference velocity");
  const std::size_t column = static_cast<std::size_t>(hit - first.v_axis.begin());
  const double spacing = 2.0 * std::abs(v_ref) / lambda / kHzPerMHz;

  ChernResult r;
  r.method = ChernMethod::kWinding;
  r.diagnostics.spacing = spacing;
  const double step = first.f_axis[1] - first.f_axis[0];
  // Peaks whose separation is this close to a multiple of the spacing are
  // rungs of one ladder.
  const double same = std::max(2.0 * step, kLadderTolerance * spacing);
  auto wrap = [&](double d) { return d - spacing * std::round(d / spacing); };
  double previous = 0.0;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto& row = maps[k].data[column];
    const double top = *std::max_element(row.begin(), row.end());
    std::vector<Peak> rungs;
    if (top > 0.0)
      for (const Peak& p : find_peaks(first.f_axis, row, kDefaultProminence * top))
        if ((band == Band::kLower) == (p.position < 0.0)) rungs.push_back(p);
    if (rungs.empty()) {
      std::ostringstream os;
      os << "map " << k << " shows no " << band_name(band) << "-band rung at v = " << v_ref
         << " m/s";
      throw Error(ErrorCategory::kNoLadder, os.str());
    }
    // Dominant ladder: the rung whose ladder-mates carry the most weight,
    // brightest rung on ties.
    std::size_t lead = 0;
    double lead_score = -1.0;
    for (std::size_t j = 0; j < rungs.size(); ++j) {
      double score = 0.0;
      for (const Peak& q : rungs)
        if (std::abs(wrap(q.position - rungs[j].position)) <= same) score += q.height;
      if (score > lead_score ||
          (score == lead_score && rungs[j].height > rungs[lead].height)) {
        lead = j;
        lead_score = score;
      }
    }
    double sum = 0.0;
    for (const Peak& q : rungs) {
      const double rel = wrap(q.position - rungs[lead].position);
      if (std::abs(rel) <= same) sum += q.height * rel;
    }
    const double offset = rungs[lead].position + sum / lead_score;
    if (k == 0) {
      previous = offset;
      r.diagnostics.track.push_back(offset);
      continue;
    }
    const double shift = wrap(offset - previous);
    // The ladder moved either by shift or by shift -/+ one spacing.
    if (spacing - 2.0 * std::abs(shift) < kAmbiguityFraction * spacing) {
      std::ostringstream os;
      os << "rung tracking is ambiguous between maps " << k - 1 << " and " << k
         << ": the ladder moved by " << shift << " or " << shift - std::copysign(spacing, shift)
         << " MHz; sample eta more finely";
      throw Error(ErrorCategory::kAmbiguous, os.str());
    }
    r.diagnostics.displacement += shift;
    r.diagnostics.track.push_back(r.diagnostics.track.back() + shift);
    previous = offset;
  }
  r.c = static_cast<int>(std::lround(r.diagnostics.displacement / spacing));
  return r;
}

}  // namespace slvst
