#include "slvst/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "slvst/errors.hpp"
#include "slvst/peaks.hpp"

namespace slvst {
namespace {

Spectrum empty_spectrum(const FrequencyGrid& grid, std::string kind) {
  Spectrum s;
  s.freq = grid.values();
  s.value.assign(grid.points, 0.0);
  s.meta.kind = std::move(kind);
  s.meta.grid = grid;
  return s;
}

void check_grid(const FrequencyGrid& grid) { (void)make_grid(grid.min, grid.max, grid.points); }

}  // namespace

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) v[i] = at(i);
  return v;
}

FrequencyGrid make_grid(double min, double max, std::size_t points) {
  if (!std::isfinite(min) || !std::isfinite(max) || !(max > min))
    throw Error(ErrorCategory::kValidation, "frequency grid needs finite min < max");
  if (points < 2) throw Error(ErrorCategory::kValidation, "frequency grid needs >= 2 points");
  return {min, max, points};
}

double Spectrum::integral() const {
  if (value.size() < 2) return 0.0;
  const double h = freq[1] - freq[0];
  double sum = 0.5 * (value.front() + value.back());
  for (std::size_t i = 1; i + 1 < value.size(); ++i) sum += value[i];
  return sum * h;
}

Spectrum dos(const LatticeParams& params, std::size_t n_x_samples, double broadening,
             const FrequencyGrid& grid) {
  validate(params);
  check_grid(grid);
  if (n_x_samples < 1000)
    throw Error(ErrorCategory::kValidation, "dos needs at least 1000 x samples");
  if (!(broadening > 0.0)) throw Error(ErrorCategory::kValidation, "dos broadening must be > 0");

  std::vector<double> energies;
  energies.reserve(2 * n_x_samples);
  const double period = 0.5 * params.lambda;
  for (std::size_t j = 0; j < n_x_samples; ++j) {
    const double x = period * static_cast<double>(j) / static_cast<double>(n_x_samples);
    const BandPair e = band_energies(params, x);
    energies.push_back(e.lower);
    energies.push_back(e.upper);
  }

  Spectrum s = empty_spectrum(grid, "dos");
  s.meta.params = params;
  const double hw = 0.5 * broadening;
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double nu = s.freq[i];
    double acc = 0.0;
    for (double e : energies) {
      const double d = nu - e;
      acc += hw / (d * d + hw * hw);
    }
    s.value[i] = acc;
  }
  const double norm = s.integral();
  for (double& v : s.value) v /= norm;
  return s;
}

LadderPeaks wsl_levels(const ChainModel& chain, double weight_floor) {
  if (chain.velocity == 0.0)
    throw Error(ErrorCategory::kLaddersUndefined,
                "Wannier-Stark ladders are undefined for atoms at rest (v_x = 0)");
  const EigenSystem es = eigensystem(chain);
  LadderPeaks out;
  const auto probe = static_cast<Eigen::Index>(chain.probe_site);
  for (Eigen::Index j = 0; j < es.energies.size(); ++j) {
    const double w = es.modes(probe, j) * es.modes(probe, j);
    if (w > weight_floor) {
      out.energies.push_back(es.energies(j));
      out.weights.push_back(w);
    }
  }
  const LadderPeriod period = ladder_period(out.energies, 1e-9, 1e-3);
  out.spacing_estimate =
      period.pairs > 0 ? period.spacing : std::numeric_limits<double>::quiet_NaN();
  return out;
}

Spectrum absorption_spectrum(const ChainModel& chain, const FrequencyGrid& grid) {
  check_grid(grid);
  const std::size_t n = chain.size();
  if (n == 0 || chain.coupling.size() + 1 != n || chain.linewidth.size() != n ||
      chain.probe_site >= n)
    throw Error(ErrorCategory::kValidation, "malformed chain model");

  double bond_sum = 0.0;
  for (std::size_t i = 0; i < chain.coupling.size(); ++i) {
    const double next = i + 1 < chain.coupling.size() ? chain.coupling[i + 1] : 0.0;
    bond_sum = std::max(bond_sum, std::abs(chain.coupling[i]) + std::abs(next));
  }
  const double widest = *std::max_element(chain.linewidth.begin(), chain.linewidth.end());
  const double reach = bond_sum + 3.0 * widest;
  if (grid.min > -reach || grid.max < reach) {
    std::ostringstream os;
    os << "frequency grid [" << grid.min << ", " << grid.max << "] must cover +/-" << reach
       << " MHz";
    throw Error(ErrorCategory::kValidation, os.str());
  }

  // Site k enters as (nu - onsite_k) + i * linewidth_k / 2.
  std::vector<double> hopping2(chain.coupling.size());
  for (std::size_t i = 0; i < hopping2.size(); ++i)
    hopping2[i] = chain.coupling[i] * chain.coupling[i];
  const std::size_t p = chain.probe_site;

  Spectrum s = empty_spectrum(grid, "absorption");
  s.meta.velocity = chain.velocity;
  for (std::size_t f = 0; f < grid.points; ++f) {
    const double nu = s.freq[f];
    // Self-energies from the right and left tails, built from the chain ends
    // inwards. Written out in real arithmetic; the loop is the hot path.
    double rr = 0.0, ri = 0.0;
    for (std::size_t k = n - 1; k > p; --k) {
      const double dr = nu - chain.onsite[k] - rr;
      const double di = 0.5 * chain.linewidth[k] - ri;
      const double den = dr * dr + di * di;
      if (den == 0.0) throw Error(ErrorCategory::kNumerical, "singular resolvent recursion");
      const double scale = hopping2[k - 1] / den;
      rr = scale * dr;
      ri = -scale * di;
    }
    double lr = 0.0, li = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double dr = nu - chain.onsite[k] - lr;
      const double di = 0.5 * chain.linewidth[k] - li;
      const double den = dr * dr + di * di;
      if (den == 0.0) throw Error(ErrorCategory::kNumerical, "singular resolvent recursion");
      const double scale = hopping2[k] / den;
      lr = scale * dr;
      li = -scale * di;
    }
    const double gr = nu - chain.onsite[p] - lr - rr;
    const double gi = 0.5 * chain.linewidth[p] - li - ri;
    const double den = gr * gr + gi * gi;
    // -Im(1 / (gr + i gi)) / pi = gi / (pi |.|^2)
    const double value = gi / (kPi * den);
    if (!std::isfinite(value))
      throw Error(ErrorCategory::kNumerical, "non-finite probe-site resolvent");
    s.value[f] = value;
  }
  return s;
}

namespace {
constexpr double kSubharmonicCoverage = 0.6;
}  // namespace

double ladder_spacing(const Spectrum& spec, double min_prominence) {
  if (spec.value.size() < 3) throw Error(ErrorCategory::kNoLadder, "no ladder resolved");
  const double top = *std::max_element(spec.value.begin(), spec.value.end());
  if (!(top > 0.0)) throw Error(ErrorCategory::kNoLadder, "no ladder resolved: empty spectrum");
  const auto peaks = find_peaks(spec.freq, spec.value, min_prominence * top);
  if (peaks.size() < 2) {
    std::ostringstream os;
    os << "no ladder resolved: " << peaks.size() << " peak(s) above prominence";
    throw Error(ErrorCategory::kNoLadder, os.str());
  }
  std::vector<double> positions;
  for (const Peak& pk : peaks) positions.push_back(pk.position);
  const double step = spec.freq[1] - spec.freq[0];
  const LadderPeriod period = ladder_period(positions, 2.0 * step, 0.02);
  if (period.pairs == 0)
    throw Error(ErrorCategory::kNoLadder, "no ladder resolved: peaks have no common period");
  // Rungs below the prominence cut can hide the true period behind a multiple.
  for (int k : {3, 2}) {
    const LadderPeriod sub = shift_match(positions, period.spacing / k, 2.0 * step, 0.02);
    if (sub.pairs >= 2 && sub.coverage >= kSubharmonicCoverage) return sub.spacing;
  }
  return period.spacing;
}

}  // namespace slvst
