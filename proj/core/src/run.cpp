#include "slvst/run.hpp"

#include <chrono>
#include <system_error>

#include "json.hpp"
#include "slvst/errors.hpp"
#include "slvst/io.hpp"
#include "slvst/parallel.hpp"
#include "slvst/spectra.hpp"
#include "slvst/tomography.hpp"
#include "slvst/topology.hpp"

#ifndef SLVST_VERSION
#define SLVST_VERSION "0.0.0"
#endif

namespace slvst {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

class Job {
 public:
  Job(const RunConfig& config, const RunOptions& options)
      : cfg_(resolve(config)),
        dir_(options.out_dir.value_or(fs::path(cfg_.output.dir))),
        overlay_(options.overlay_theory || cfg_.output.overlay_theory) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCategory::kIo, "cannot create '" + dir_.string() + "': " + ec.message());
  }

  RunResult execute() {
    const auto start = std::chrono::steady_clock::now();
    put("command", std::string(command_name(cfg_.command)));
    switch (cfg_.command) {
      case Command::kDos: do_dos(); break;
      case Command::kWsl: do_wsl(); break;
      case Command::kAbsorb: do_absorb(); break;
      case Command::kVstMap: do_vst_map(); break;
      case Command::kZak: do_zak(); break;
      case Command::kChern: do_chern(); break;
      case Command::kWinding: do_winding(); break;
    }
    result_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_metadata();
    return std::move(result_);
  }

 private:
  template <class T>
  void put(const std::string& key, T value) {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::size_t> ||
                  std::is_same_v<T, long>)
      result_.summary.emplace_back(key, static_cast<long long>(value));
    else
      result_.summary.emplace_back(key, SummaryValue(std::move(value)));
  }

  fs::path file(const std::string& name) {
    const fs::path p = dir_ / name;
    result_.files.push_back(p);
    return p;
  }

  EnsembleOptions ensemble() const { return {*cfg_.grid, cfg_.chain->n_sites}; }

  VstMap build_map(const LatticeParams& params) {
    const auto v = cfg_.scan->velocities();
    if (cfg_.scan->source == MapSource::kDirect)
      return direct_map(params, v, ensemble(), cfg_.tracking ? cfg_.tracking->min_overlap_fraction : 0.0,
                        cfg_.tracking ? cfg_.tracking->prominence : kDefaultProminence);
    VstOptions opt;
    opt.ensemble = ensemble();
    opt.nodes_per_fwhm = cfg_.pump->nodes_per_fwhm;
    if (cfg_.tracking) {
      opt.min_overlap_fraction = cfg_.tracking->min_overlap_fraction;
      opt.prominence = cfg_.tracking->prominence;
    }
    const ThermalDist dist = thermal_dist_from_fwhm(cfg_.thermal->fwhm, cfg_.thermal->nodes);
    const PumpSetting pump(0.0, params.lambda, cfg_.pump->hole_fwhm, cfg_.pump->depth);
    return vst_map(params, dist, pump, v, opt);
  }

  void emit_map(const VstMap& map, const LatticeParams& params, const std::string& stem) {
    write_map_csv(map, file(stem + ".csv"), file(stem == "map" ? "trajectories.csv"
                                                               : "trajectories_" + stem + ".csv"));
    if (!cfg_.output.svg) return;
    HeatmapStyle style;
    style.scale = cfg_.output.color_scale;
    style.title = stem;
    if (overlay_)
      style.overlay = theory_ladder_lines(params, map.f_axis.front(), map.f_axis.back(),
                                          std::abs(map.v_axis.back()));
    render_heatmap_svg(map, file(stem + ".svg"), style);
  }

  void do_dos() {
    const Spectrum s = dos(*cfg_.lattice, cfg_.dos->samples, cfg_.dos->broadening,
                           cfg_.grid.value_or(FrequencyGrid{}));
    write_spectrum_csv(s, file("dos.csv"));
    put("integral", s.integral());
    put("band_gap_mhz", min_band_gap(*cfg_.lattice));
  }

  void do_wsl() {
    const LatticeParams& p = *cfg_.lattice;
    const VelocityClass vel(cfg_.velocity->v, p.lambda);
    const LadderPeaks peaks =
        wsl_levels(build_chain(p, vel, cfg_.chain->n_sites), cfg_.wsl->weight_floor);
    write_wsl_csv(peaks, file("wsl.csv"));
    put("levels", peaks.energies.size());
    put("spacing_mhz", peaks.spacing_estimate);
    put("bloch_freq_single_mhz", vel.bloch_freq_single());
    put("bloch_freq_two_band_mhz", vel.bloch_freq_two_band());
  }

  void do_absorb() {
    const LatticeParams& p = *cfg_.lattice;
    const VelocityClass vel(cfg_.velocity->v, p.lambda);
    const Spectrum s = absorption_spectrum(build_chain(p, vel, cfg_.chain->n_sites), *cfg_.grid);
    write_spectrum_csv(s, file("absorption.csv"));
    put("integral", s.integral());
    if (vel.v() != 0.0) {
      try {
        put("ladder_spacing_mhz", ladder_spacing(s));
      } catch (const Error& e) {
        if (e.category() != ErrorCategory::kNoLadder) throw;
        put("ladder_spacing_mhz", std::string("unresolved"));
      }
    }
  }

  void do_vst_map() {
    const VstMap map = build_map(*cfg_.lattice);
    emit_map(map, *cfg_.lattice, "map");
    put("velocities", map.v_axis.size());
    put("trajectories", map.ladders.size());
  }

  void do_zak() {
    const TopologyBlock& t = *cfg_.topology;
    put("band", std::string(band_name(t.band)));
    put("gauge", std::string(gauge_name(t.gauge)));
    if (cfg_.path) {
      const ZakWinding w =
          zak_winding(cfg_.path->path, t.band, t.unwrap_samples, t.zak_points, t.gauge, cfg_.path->optics);
      write_csv(file("zak_winding.csv"), {"eta", "theta_rad"}, {w.eta, w.theta});
      put("winding_rad", w.total);
      put("winding_turns", w.total / kTwoPi);
      if (t.eta) {
        const ZakResult z = zak_line(cfg_.path->path, *t.eta, t.band, t.zak_points, t.gauge, cfg_.path->optics);
        put("theta", z.theta);
        put("uncertainty", z.uncertainty);
      }
      put("method", std::string("wilson"));
      return;
    }
    const LatticeParams& p = *cfg_.lattice;
    const ZakResult z = zak_wilson(p, t.band, t.zak_points, t.gauge);
    put("method", std::string("wilson"));
    put("theta", z.theta);
    put("uncertainty", z.uncertainty);
    put("theta_unit_cell", zak_wilson(p, t.band, t.zak_points, ZakGauge::kUnitCell).theta);
    put("theta_site_position", zak_wilson(p, t.band, t.zak_points, ZakGauge::kSitePosition).theta);
    if (!cfg_.scan) return;
    const VstMap map = build_map(p);
    emit_map(map, p, "map");
    const auto band = select_band_trajectories(map.ladders, p, t.band, t.min_gap);
    const ZakResult s = zak_from_slope(band, p.lambda, t.band);
    put("theta_slope", s.theta);
    put("theta_slope_uncertainty", s.uncertainty);
    put("slope_trajectories", band.size());
  }

  void do_chern() {
    const TopologyBlock& t = *cfg_.topology;
    const ChernResult c = chern_fhs(cfg_.path->path, t.nx, t.neta, t.band, cfg_.path->optics);
    put("c", c.c);
    put("method", std::string(method_name(c.method)));
    put("band", std::string(band_name(t.band)));
    put("max_abs_field", c.diagnostics.max_abs_field);
    put("field_sum", c.diagnostics.field_sum);
    put("min_gap_mhz", c.diagnostics.min_gap);
  }

  void do_winding() {
    const TopologyBlock& t = *cfg_.topology;
    std::vector<VstMap> maps;
    std::vector<double> etas;
    for (std::size_t k = 0; k <= t.eta_steps; ++k) {
      const double eta = 8.0 * static_cast<double>(k) / static_cast<double>(t.eta_steps);
      const LatticeParams p = h2_params(cfg_.path->path, eta, cfg_.path->optics);
      maps.push_back(build_map(p));
      emit_map(maps.back(), p, "map_eta" + std::to_string(k));
      etas.push_back(eta);
    }
    const ChernResult c = winding_from_wsl(maps, cfg_.path->optics.lambda, t.reference_velocity, t.band);
    write_csv(file("winding_track.csv"), {"eta", "energy_mhz"}, {etas, c.diagnostics.track});
    put("c", c.c);
    put("method", std::string(method_name(c.method)));
    put("band", std::string(band_name(t.band)));
    put("displacement_mhz", c.diagnostics.displacement);
    put("spacing_mhz", c.diagnostics.spacing);
  }

  void write_metadata() {
    ojson meta;
    meta["slvst_version"] = std::string(version());
    meta["config"] = ojson::parse(serialize_config(cfg_));
    ojson summary = ojson::object();
    for (const auto& [key, value] : result_.summary)
      std::visit([&](const auto& v) { summary[key] = v; }, value);
    meta["summary"] = summary;
    ojson files = ojson::array();
    for (const auto& f : result_.files) files.push_back(f.filename().string());
    meta["files"] = files;
    meta["threads"] = thread_count();
    meta["wall_time_s"] = result_.wall_time_s;
    write_text(file("metadata.json"), meta.dump(2) + "\n");
  }

  RunConfig cfg_;
  fs::path dir_;
  bool overlay_;
  RunResult result_;
};

}  // namespace

std::string_view version() { return SLVST_VERSION; }

const SummaryValue* RunResult::find(std::string_view key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return &v;
  return nullptr;
}

std::string summary_text(const SummaryValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return format_double(v);
        else return v;
      },
      value);
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  return Job(config, options).execute();
}

}  // namespace slvst
