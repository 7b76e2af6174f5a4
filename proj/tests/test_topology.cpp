#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "random_paths.hpp"
#include "slvst/errors.hpp"
#include "slvst/model.hpp"
#include "slvst/spectra.hpp"
#include "slvst/tomography.hpp"
#include "slvst/topology.hpp"

using namespace slvst;

namespace {

const LatticeParams kFig2 = make_lattice_params(101, 36, -71);
const PumpPath kFig4a = make_pump_path(68, 2.0 / 3.0, 100, 0);
const PumpPath kFig4b = make_pump_path(68, 2.0 / 3.0, 12.5, 87.5);

// Unit-cell Zak phase of the lower fig2 band, 2^14-point brute-force loop.
constexpr double kFig2Zak = -0.0655158;

double circ(double a, double b) { return std::abs(wrap_phase(a - b)); }

ErrorCategory category_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("expected slvst::Error");
  return ErrorCategory::kNumerical;
}

std::vector<VstMap> direct_loop(const PumpPath& path, double v, int steps,
                                const EnsembleOptions& opts = {}) {
  const std::vector<double> scan{v};
  std::vector<VstMap> maps;
  for (int k = 0; k <= steps; ++k)
    maps.push_back(direct_map(h2_params(path, 8.0 * k / steps), scan, opts));
  return maps;
}

Trajectory synthetic_rung(int n, double theta, double lambda, double v0, double dv) {
  Trajectory t;
  for (int i = 0; i < 7; ++i) {
    const double v = v0 + dv * i;
    t.push_back({v, (n + theta / (2 * oracle::kPi)) * 2 * v / lambda / 1e6});
  }
  return t;
}

}  // namespace

TEST_CASE("wrap phase") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(oracle::kPi) == doctest::Approx(oracle::kPi));
  CHECK(wrap_phase(-oracle::kPi) == doctest::Approx(oracle::kPi));
  CHECK(wrap_phase(3 * oracle::kPi / 2) == doctest::Approx(-oracle::kPi / 2));
  CHECK(wrap_phase(1.0 + 6 * oracle::kPi) == doctest::Approx(1.0));
}

TEST_CASE("ssh limits are quantized") {
  std::mt19937_64 rng(7);
  const double cell_pi = zak_wilson(make_lattice_params(30, 90, 0)).theta;
  const double cell_0 = zak_wilson(make_lattice_params(90, 30, 0)).theta;
  CHECK(std::abs(cell_pi) == doctest::Approx(oracle::kPi).epsilon(1e-9));
  CHECK(std::abs(cell_0) < 1e-9);
  CHECK(circ(cell_pi, oracle::berry_phase(30, 90, 0, 0, 1 << 14, rng)) < 1e-6);
  CHECK(circ(cell_0, oracle::berry_phase(90, 30, 0, 0, 1 << 14, rng)) < 1e-6);
}

TEST_CASE("atomic limit has no zak phase") {
  const auto p = make_lattice_params(50, 1e-4, 500);
  CHECK(std::abs(zak_wilson(p).theta) < 1e-6);
  CHECK(std::abs(zak_wilson(p, Band::kUpper).theta) < 1e-6);
}

TEST_CASE("fig2 zak phase") {
  std::mt19937_64 rng(11);
  const auto z = zak_wilson(kFig2);
  CHECK(z.theta == doctest::Approx(kFig2Zak).epsilon(1e-5));
  CHECK(circ(z.theta, oracle::berry_phase(101, 36, -71, 0, 1 << 14, rng)) < 1e-6);
  CHECK(z.uncertainty < 1e-6);
  CHECK(z.method == ZakMethod::kWilson);
  CHECK(circ(zak_wilson(kFig2, Band::kUpper).theta, -z.theta) < 1e-9);
}

TEST_CASE("wilson loop converges") {
  for (const auto& p : {kFig2, make_lattice_params(40, 80, 25)}) {
    CHECK(circ(zak_wilson(p, Band::kLower, 4096).theta, zak_wilson(p, Band::kLower, 8192).theta) <
          1e-6);
  }
}

TEST_CASE("site-position gauge adds pi times the b weight") {
  for (const auto& p : {kFig2, make_lattice_params(40, 80, 25), make_lattice_params(60, 20, -5)}) {
    for (Band band : {Band::kLower, Band::kUpper}) {
      const std::size_t n = 4096;
      double pb = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        pb += std::norm(band_eigenvector(p, p.lambda / 2 * j / n, band)(1)) / n;
      const double cell = zak_wilson(p, band, n).theta;
      const double pos = zak_wilson(p, band, n, ZakGauge::kSitePosition).theta;
      CHECK(circ(pos, cell + oracle::kPi * pb) < 1e-6);
    }
  }
}

TEST_CASE("wilson loops ignore eigenvector phases") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> phase(0, 2 * oracle::kPi);
  for (ZakGauge gauge : {ZakGauge::kUnitCell, ZakGauge::kSitePosition}) {
    const bool twisted = gauge == ZakGauge::kSitePosition;
    auto states = bz_states(kFig2, Band::kLower, 1024, gauge);
    const double ref = wilson_loop_phase(states, twisted);
    for (int trial = 0; trial < 5; ++trial) {
      auto scrambled = states;
      for (auto& s : scrambled) s *= std::polar(1.0, phase(rng));
      CHECK(std::abs(wrap_phase(wilson_loop_phase(scrambled, twisted) - ref)) < 1e-10);
    }
    CHECK(circ(wilson_loop_phase(bz_states(kFig2, Band::kLower, 2048, gauge), twisted),
               zak_wilson(kFig2, Band::kLower, 1024, gauge).theta) < 1e-12);
  }
}

TEST_CASE("zak wilson rejects closed gaps and coarse loops") {
  CHECK(category_of([] { zak_wilson(make_lattice_params(70, 70, 0), Band::kLower, 64); }) ==
        ErrorCategory::kDegenerate);
  CHECK(category_of([] { zak_wilson(kFig2, Band::kLower, 63); }) == ErrorCategory::kValidation);
}

TEST_CASE("slope formula inverts synthetic ladders") {
  const double lambda = kDefaultWavelength;
  std::vector<Trajectory> t;
  for (int n = -2; n <= 2; ++n) t.push_back(synthetic_rung(n, 1.2, lambda, 100, 20));
  const auto z = zak_from_slope(t, lambda);
  CHECK(z.theta == doctest::Approx(1.2).epsilon(0.01 / 1.2));
  CHECK(z.uncertainty < 0.01);
  CHECK(z.method == ZakMethod::kSlope);

  std::vector<Trajectory> wrapped;
  for (int n = 0; n < 3; ++n) wrapped.push_back(synthetic_rung(n, -3.0, lambda, 50, 10));
  CHECK(circ(zak_from_slope(wrapped, lambda).theta, -3.0) < 1e-9);
}

TEST_CASE("slope formula rejects inconsistent trajectories") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> slope(-2, 2);
  std::vector<Trajectory> t;
  for (int k = 0; k < 4; ++k) {
    const double s = slope(rng);
    Trajectory tr;
    for (int i = 0; i < 6; ++i) tr.push_back({100.0 + 10 * i, s * (100.0 + 10 * i)});
    t.push_back(tr);
  }
  t[0] = synthetic_rung(0, 0.0, kDefaultWavelength, 100, 10);
  t[1] = synthetic_rung(1, oracle::kPi / 2, kDefaultWavelength, 100, 10);
  CHECK(category_of([&] { zak_from_slope(t, kDefaultWavelength); }) ==
        ErrorCategory::kInconsistent);
}

TEST_CASE("slope formula needs enough trajectories") {
  std::vector<Trajectory> t{synthetic_rung(0, 1.0, kDefaultWavelength, 100, 10),
                            synthetic_rung(1, 1.0, kDefaultWavelength, 100, 10)};
  CHECK(category_of([&] { zak_from_slope(t, kDefaultWavelength); }) ==
        ErrorCategory::kValidation);
  t.push_back(synthetic_rung(2, 1.0, kDefaultWavelength, 100, 10));
  t.back().resize(4);
  CHECK(category_of([&] { zak_from_slope(t, kDefaultWavelength); }) ==
        ErrorCategory::kValidation);
}

TEST_CASE("weak-field ladder slopes approach the site-position zak phase") {
  // Stark corrections bend the slope linearly in v; narrow lines resolve the rungs.
  const auto p = make_lattice_params(101, 36, -71, kDefaultWavelength, 0.2, 0.2);
  EnsembleOptions opts;
  opts.grid = make_grid(-300, 300, 24001);
  opts.n_sites = 1201;
  double err[2];
  double theta[2];
  const double exact = zak_wilson(p, Band::kLower, 4096, ZakGauge::kSitePosition).theta;
  for (int k = 0; k < 2; ++k) {
    const double v0 = 1.0 + k;
    std::vector<double> scan;
    for (int i = 0; i <= 10; ++i) scan.push_back(v0 * (1 + 0.1 * i));
    const auto map = direct_map(p, scan, opts);
    const auto z = zak_from_slope(select_band_trajectories(map.ladders, p, Band::kLower), p.lambda);
    theta[k] = z.theta;
    err[k] = circ(z.theta, exact);
  }
  CHECK(err[0] < err[1]);
  CHECK(err[0] < 0.05);
  CHECK(circ(2 * theta[0] - theta[1], exact) < 0.01);
}

TEST_CASE("band selection refuses closed gaps") {
  CHECK(category_of([] {
          select_band_trajectories({}, make_lattice_params(70, 70, 0), Band::kLower);
        }) == ErrorCategory::kDegenerate);
}

TEST_CASE("fig4 chern numbers") {
  const auto a = chern_fhs(kFig4a);
  const auto b = chern_fhs(kFig4b);
  CHECK(a.c == 1);
  CHECK(b.c == 0);
  CHECK(a.method == ChernMethod::kFhs);
  CHECK(std::abs(a.diagnostics.field_sum - 1) < 1e-6);
  CHECK(a.diagnostics.max_abs_field < oracle::kPi / 2);
  CHECK(a.diagnostics.min_gap > 10);
  std::mt19937_64 rng(13);
  CHECK(oracle::chern(68, 2.0 / 3.0, 100, 0, 0, 64, rng) == doctest::Approx(1).epsilon(1e-6));
  CHECK(std::abs(oracle::chern(68, 2.0 / 3.0, 12.5, 87.5, 0, 64, rng)) < 1e-6);
}

TEST_CASE("eta-independent path has no curvature") {
  const auto c = chern_fhs(make_pump_path(68, 0, 0, 40));
  CHECK(c.c == 0);
  CHECK(c.diagnostics.max_abs_field < 1e-12);
}

TEST_CASE("chern numbers of the two bands cancel") {
  for (const auto& p : testing::random_gapped_paths(20)) {
    INFO("A=" << p.A << " r=" << p.r << " B=" << p.B << " u=" << p.u);
    const int lower = chern_fhs(p).c;
    CHECK(lower + chern_fhs(p, 64, 64, Band::kUpper).c == 0);
    std::mt19937_64 rng(17);
    CHECK(lower == doctest::Approx(oracle::chern(p.A, p.r, p.B, p.u, 0, 48, rng)).epsilon(1e-6));
  }
}

TEST_CASE("chern fhs rejects gap closings and coarse grids") {
  CHECK(category_of([] { chern_fhs(make_pump_path(68, 0, 0, 0)); }) ==
        ErrorCategory::kDegenerate);
  CHECK(category_of([] { chern_fhs(kFig4a, 15, 64); }) == ErrorCategory::kValidation);
  CHECK(category_of([] { chern_fhs(kFig4a, 64, 8); }) == ErrorCategory::kValidation);
}

TEST_CASE("strip curvature equals the change of the zak phase") {
  for (const auto& [e1, e2] : {std::pair{0.0, 1.7}, std::pair{1.3, 3.7}, std::pair{2.0, 7.5}}) {
    const double strip = strip_curvature(kFig4a, e1, e2, 512, 64);
    const int n = 80;
    double unwrapped = 0.0;
    double prev = zak_line(kFig4a, e1).theta;
    for (int k = 1; k <= n; ++k) {
      const double cur = zak_line(kFig4a, e1 + (e2 - e1) * k / n).theta;
      unwrapped += wrap_phase(cur - prev);
      prev = cur;
    }
    INFO("eta " << e1 << " .. " << e2);
    CHECK(std::abs(strip - unwrapped) < 1e-3);
  }
}

TEST_CASE("zak line has period eight") {
  CHECK(circ(zak_line(kFig4a, 0).theta, zak_line(kFig4a, 8).theta) < 1e-12);
  CHECK(circ(zak_line(kFig4b, 2.5).theta, zak_line(kFig4b, 10.5).theta) < 1e-9);
}

TEST_CASE("zak phase winds with the chern number") {
  const auto a = zak_winding(kFig4a);
  const auto b = zak_winding(kFig4b);
  CHECK(a.total == doctest::Approx(2 * oracle::kPi).epsilon(1e-2 / (2 * oracle::kPi)));
  CHECK(std::abs(b.total) < 1e-2);
  CHECK(a.eta.size() == kDefaultUnwrapSamples + 1);
  CHECK(a.eta.back() == doctest::Approx(8));
  CHECK(category_of([] { zak_winding(kFig4a, Band::kLower, 4); }) ==
        ErrorCategory::kGridResolution);
}

TEST_CASE("ladder winding reproduces the fig4 chern numbers") {
  const auto a = winding_from_wsl(direct_loop(kFig4a, 20, 8), kDefaultWavelength);
  const auto b = winding_from_wsl(direct_loop(kFig4b, 20, 8), kDefaultWavelength);
  CHECK(a.c == 1);
  CHECK(b.c == 0);
  CHECK(a.method == ChernMethod::kWinding);
  CHECK(a.diagnostics.spacing == doctest::Approx(2 * 20 / kDefaultWavelength / 1e6));
  CHECK(a.diagnostics.displacement == doctest::Approx(a.diagnostics.spacing).epsilon(0.15));
  CHECK(std::abs(b.diagnostics.displacement) < 0.15 * b.diagnostics.spacing);
  CHECK(a.diagnostics.track.size() == 9);
}

TEST_CASE("identical maps do not wind") {
  const auto c = winding_from_wsl(direct_loop(make_pump_path(68, 0, 0, 40), 20, 8),
                                  kDefaultWavelength);
  CHECK(c.c == 0);
  CHECK(c.diagnostics.displacement == 0.0);
}

TEST_CASE("ladder winding agrees with fhs on random paths") {
  for (const auto& p : testing::random_gapped_paths(20)) {
    INFO("A=" << p.A << " r=" << p.r << " B=" << p.B << " u=" << p.u);
    CHECK(winding_from_wsl(direct_loop(p, 20, 32), kDefaultWavelength).c == chern_fhs(p).c);
  }
}

TEST_CASE("ladder winding errors") {
  CHECK(category_of([] { winding_from_wsl(direct_loop(kFig4a, 20, 2), kDefaultWavelength); }) ==
        ErrorCategory::kAmbiguous);
  auto flat = direct_loop(kFig4a, 20, 8);
  for (auto& m : flat)
    for (auto& col : m.data) std::fill(col.begin(), col.end(), 0.0);
  CHECK(category_of([&] { winding_from_wsl(flat, kDefaultWavelength); }) ==
        ErrorCategory::kNoLadder);
  auto rest = direct_loop(kFig4a, 20, 8);
  for (auto& m : rest) m.v_axis = {0.0};
  CHECK(category_of([&] { winding_from_wsl(rest, kDefaultWavelength, 0.0); }) ==
        ErrorCategory::kLaddersUndefined);
  CHECK(category_of([] {
          const auto one = direct_loop(kFig4a, 20, 8);
          winding_from_wsl(std::span(one).first(1), kDefaultWavelength);
        }) == ErrorCategory::kValidation);
}
