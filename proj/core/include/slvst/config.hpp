#pragma once

// Run configuration. The canonical text format is JSON; see README for the
// schema. Unknown keys are rejected.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slvst/model.hpp"
#include "slvst/spectra.hpp"
#include "slvst/tomography.hpp"
#include "slvst/topology.hpp"

namespace slvst {

enum class Command { kDos, kWsl, kAbsorb, kVstMap, kZak, kChern, kWinding };

std::string_view command_name(Command command);
/// Throws kConfigSchema for an unknown name.
Command parse_command(std::string_view name);

struct ChainBlock {
  std::size_t n_sites = kDefaultChainSites;
  bool operator==(const ChainBlock&) const = default;
};

struct VelocityBlock {
  double v = 0.0;  ///< m/s
  bool operator==(const VelocityBlock&) const = default;
};

enum class MapSource { kDifference, kDirect };

struct ScanRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  bool operator==(const ScanRange&) const = default;
};

/// Scanned velocities, either listed or as an inclusive range.
struct ScanBlock {
  std::optional<ScanRange> range;
  std::vector<double> values;
  MapSource source = MapSource::kDifference;

  std::vector<double> velocities() const;
  bool operator==(const ScanBlock&) const = default;
};

struct ThermalBlock {
  double fwhm = kDefaultThermalFwhm;  ///< m/s
  std::size_t nodes = kDefaultCoarseNodes;
  bool operator==(const ThermalBlock&) const = default;
};

struct PumpBlock {
  double hole_fwhm = kDefaultHoleFwhm;  ///< m/s
  double depth = 1.0;
  std::size_t nodes_per_fwhm = kDefaultNodesPerHole;
  bool operator==(const PumpBlock&) const = default;
};

struct DosBlock {
  std::size_t samples = kDefaultDosSamples;
  double broadening = kDefaultDosBroadening;
  bool operator==(const DosBlock&) const = default;
};

struct WslBlock {
  double weight_floor = kDefaultWeightFloor;
  bool operator==(const WslBlock&) const = default;
};

struct PathBlock {
  PumpPath path;
  Optics optics;
  bool operator==(const PathBlock&) const = default;
};

struct TopologyBlock {
  Band band = Band::kLower;
  ZakGauge gauge = ZakGauge::kUnitCell;
  std::size_t zak_points = kDefaultZakPoints;
  std::size_t nx = kDefaultChernGrid;
  std::size_t neta = kDefaultChernGrid;
  std::size_t unwrap_samples = kDefaultUnwrapSamples;
  std::size_t eta_steps = 8;  ///< winding maps at eta = 8 k / eta_steps
  std::optional<double> eta;
  std::optional<double> reference_velocity;
  double min_gap = kDefaultMinSlopeGap;
  bool operator==(const TopologyBlock&) const = default;
};

struct TrackingBlock {
  double min_overlap_fraction = 0.0;
  double prominence = kDefaultProminence;
  bool operator==(const TrackingBlock&) const = default;
};

enum class ColorScale { kHeat, kGray };

struct OutputBlock {
  std::string dir = "slvst-out";
  bool svg = true;
  bool overlay_theory = false;
  ColorScale color_scale = ColorScale::kHeat;
  bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
  Command command = Command::kDos;
  std::optional<LatticeParams> lattice;
  std::optional<ChainBlock> chain;
  std::optional<FrequencyGrid> grid;
  std::optional<VelocityBlock> velocity;
  std::optional<ScanBlock> scan;
  std::optional<ThermalBlock> thermal;
  std::optional<PumpBlock> pump;
  std::optional<DosBlock> dos;
  std::optional<WslBlock> wsl;
  std::optional<PathBlock> path;
  std::optional<TopologyBlock> topology;
  std::optional<TrackingBlock> tracking;
  OutputBlock output;

  bool operator==(const RunConfig&) const = default;
};

/// Throws kConfigParse (with line and column) for malformed text,
/// kConfigSchema for unknown, missing, mistyped or misplaced keys, and
/// kValidation for out-of-domain values.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& file);

/// Canonical JSON text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Copy with every optional block the command reads filled with defaults.
RunConfig resolve(const RunConfig& config);

}  // namespace slvst
