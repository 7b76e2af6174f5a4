#include "slvst/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"
#include "slvst/errors.hpp"

namespace slvst {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::size_t kMaxScanPoints = 100000;

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCategory::kConfigSchema, msg); }
[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCategory::kValidation, msg); }

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported.
class Block {
 public:
  Block(const json& node, std::string name) : node_(node), name_(std::move(name)) {
    if (!node_.is_object()) schema("'" + name_ + "' must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  std::string key_path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key) {
    if (!has(key)) schema("missing required key '" + key_path(key) + "'");
    const json& v = raw(key);
    if (!v.is_number()) schema("'" + key_path(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) invalid("'" + key_path(key) + "' must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      schema("'" + key_path(key) + "' must be a non-negative integer");
    return v.get<std::size_t>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) schema("'" + key_path(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) schema("'" + key_path(key) + "' must be a string");
    return v.get<std::string>();
  }

  template <class E>
  E choice(const std::string& key, E fallback,
           std::initializer_list<std::pair<const char*, E>> options) {
    if (!has(key)) return fallback;
    const std::string s = text(key, "");
    std::string names;
    for (const auto& [name, value] : options) {
      if (s == name) return value;
      names += names.empty() ? "" : ", ";
      names += name;
    }
    schema("'" + key_path(key) + "' must be one of " + names + " (got '" + s + "')");
  }

  void finish() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key())) schema("unknown key '" + key_path(item.key()) + "'");
  }

 private:
  const json& node_;
  std::string name_;
  std::set<std::string> seen_;
};

constexpr std::pair<const char*, Band> kBands[] = {{"lower", Band::kLower},
                                                   {"upper", Band::kUpper}};

LatticeParams read_lattice(const json& node) {
  Block b(node, "lattice");
  LatticeParams p;
  p.t1 = b.number("t1");
  p.t2 = b.number("t2");
  p.delta = b.number("delta");
  p.lambda = b.number("lambda", kDefaultWavelength);
  p.gamma_a = b.number("gamma_a", kDefaultGammaA);
  p.gamma_b = b.number("gamma_b", kDefaultGammaB);
  b.finish();
  validate(p);
  return p;
}

ChainBlock read_chain(const json& node) {
  Block b(node, "chain");
  ChainBlock c;
  c.n_sites = b.count("n_sites", c.n_sites);
  b.finish();
  if (c.n_sites < 11 || c.n_sites % 2 == 0)
    invalid("'chain.n_sites' must be odd and >= 11");
  return c;
}

FrequencyGrid read_grid(const json& node) {
  Block b(node, "grid");
  FrequencyGrid g;
  g.min = b.number("min", g.min);
  g.max = b.number("max", g.max);
  g.points = b.count("points", g.points);
  b.finish();
  return make_grid(g.min, g.max, g.points);
}

VelocityBlock read_velocity(const json& node) {
  Block b(node, "velocity");
  VelocityBlock v;
  v.v = b.number("v");
  b.finish();
  return v;
}

ScanBlock read_scan(const json& node) {
  Block b(node, "scan");
  ScanBlock s;
  const bool has_range = b.has("range");
  const bool has_values = b.has("values");
  if (has_range == has_values) schema("'scan' needs exactly one of 'range' or 'values'");
  if (has_range) {
    Block r(b.raw("range"), "scan.range");
    ScanRange range;
    range.start = r.number("start");
    range.stop = r.number("stop");
    range.step = r.number("step");
    r.finish();
    if (!(range.step > 0.0)) invalid("'scan.range.step' must be > 0");
    if (range.stop < range.start) invalid("'scan.range.stop' must be >= start");
    if ((range.stop - range.start) / range.step > static_cast<double>(kMaxScanPoints))
      invalid("'scan.range' has too many points");
    s.range = range;
  } else {
    const json& v = b.raw("values");
    if (!v.is_array() || v.empty()) schema("'scan.values' must be a non-empty array");
    for (const auto& x : v) {
      if (!x.is_number()) schema("'scan.values' must contain numbers only");
      s.values.push_back(x.get<double>());
      if (!std::isfinite(s.values.back())) invalid("'scan.values' must be finite");
    }
    for (std::size_t i = 1; i < s.values.size(); ++i)
      if (!(s.values[i] > s.values[i - 1])) invalid("'scan.values' must be strictly ascending");
  }
  s.source = b.choice("source", s.source,
                      {{"difference", MapSource::kDifference}, {"direct", MapSource::kDirect}});
  b.finish();
  return s;
}

ThermalBlock read_thermal(const json& node) {
  Block b(node, "thermal");
  ThermalBlock t;
  t.fwhm = b.number("fwhm", t.fwhm);
  t.nodes = b.count("nodes", t.nodes);
  b.finish();
  if (!(t.fwhm > 0.0)) invalid("'thermal.fwhm' must be > 0");
  if (t.nodes < 3) invalid("'thermal.nodes' must be >= 3");
  return t;
}

PumpBlock read_pump(const json& node) {
  Block b(node, "pump");
  PumpBlock p;
  p.hole_fwhm = b.number("hole_fwhm", p.hole_fwhm);
  p.depth = b.number("depth", p.depth);
  p.nodes_per_fwhm = b.count("nodes_per_fwhm", p.nodes_per_fwhm);
  b.finish();
  if (!(p.hole_fwhm > 0.0)) invalid("'pump.hole_fwhm' must be > 0");
  if (!(p.depth > 0.0 && p.depth <= 1.0)) invalid("'pump.depth' must lie in (0, 1]");
  if (p.nodes_per_fwhm < 1) invalid("'pump.nodes_per_fwhm' must be >= 1");
  return p;
}

DosBlock read_dos(const json& node) {
  Block b(node, "dos");
  DosBlock d;
  d.samples = b.count("samples", d.samples);
  d.broadening = b.number("broadening", d.broadening);
  b.finish();
  if (d.samples < 1000) invalid("'dos.samples' must be >= 1000");
  if (!(d.broadening > 0.0)) invalid("'dos.broadening' must be > 0");
  return d;
}

WslBlock read_wsl(const json& node) {
  Block b(node, "wsl");
  WslBlock w;
  w.weight_floor = b.number("weight_floor", w.weight_floor);
  b.finish();
  if (!(w.weight_floor >= 0.0 && w.weight_floor < 1.0))
    invalid("'wsl.weight_floor' must lie in [0, 1)");
  return w;
}

PathBlock read_path(const json& node) {
  Block b(node, "path");
  PathBlock p;
  const double A = b.number("A");
  const double r = b.number("r");
  const double B = b.number("B");
  const double u = b.number("u");
  p.optics.lambda = b.number("lambda", kDefaultWavelength);
  p.optics.gamma_a = b.number("gamma_a", kDefaultGammaA);
  p.optics.gamma_b = b.number("gamma_b", kDefaultGammaB);
  b.finish();
  p.path = make_pump_path(A, r, B, u);
  (void)make_lattice_params(1.0, 1.0, 0.0, p.optics.lambda, p.optics.gamma_a, p.optics.gamma_b);
  return p;
}

TopologyBlock read_topology(const json& node) {
  Block b(node, "topology");
  TopologyBlock t;
  t.band = b.choice("band", t.band, {kBands[0], kBands[1]});
  t.gauge = b.choice("gauge", t.gauge,
                     {{"unit-cell", ZakGauge::kUnitCell},
                      {"site-position", ZakGauge::kSitePosition}});
  t.zak_points = b.count("zak_points", t.zak_points);
  t.nx = b.count("nx", t.nx);
  t.neta = b.count("neta", t.neta);
  t.unwrap_samples = b.count("unwrap_samples", t.unwrap_samples);
  t.eta_steps = b.count("eta_steps", t.eta_steps);
  if (b.has("eta")) t.eta = b.number("eta");
  if (b.has("reference_velocity")) t.reference_velocity = b.number("reference_velocity");
  t.min_gap = b.number("min_gap", t.min_gap);
  b.finish();
  if (t.zak_points < kMinZakPoints) invalid("'topology.zak_points' must be >= 64");
  if (t.nx < kMinChernGrid || t.neta < kMinChernGrid)
    invalid("'topology.nx' and 'topology.neta' must be >= 16");
  if (t.unwrap_samples < 2) invalid("'topology.unwrap_samples' must be >= 2");
  if (t.eta_steps < 1) invalid("'topology.eta_steps' must be >= 1");
  if (!(t.min_gap >= 0.0)) invalid("'topology.min_gap' must be >= 0");
  return t;
}

TrackingBlock read_tracking(const json& node) {
  Block b(node, "tracking");
  TrackingBlock t;
  t.min_overlap_fraction = b.number("min_overlap_fraction", t.min_overlap_fraction);
  t.prominence = b.number("prominence", t.prominence);
  b.finish();
  if (!(t.min_overlap_fraction >= 0.0 && t.min_overlap_fraction <= 1.0))
    invalid("'tracking.min_overlap_fraction' must lie in [0, 1]");
  if (!(t.prominence > 0.0 && t.prominence < 1.0))
    invalid("'tracking.prominence' must lie in (0, 1)");
  return t;
}

OutputBlock read_output(const json& node) {
  Block b(node, "output");
  OutputBlock o;
  o.dir = b.text("dir", o.dir);
  o.svg = b.flag("svg", o.svg);
  o.overlay_theory = b.flag("overlay_theory", o.overlay_theory);
  o.color_scale =
      b.choice("color_scale", o.color_scale, {{"heat", ColorScale::kHeat}, {"gray", ColorScale::kGray}});
  b.finish();
  if (o.dir.empty()) invalid("'output.dir' must not be empty");
  return o;
}

// Blocks each command may carry; the first group is mandatory.
struct BlockRule {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

BlockRule rule_for(Command c, bool has_path) {
  switch (c) {
    case Command::kDos:
      return {{"lattice"}, {"grid", "dos"}};
    case Command::kWsl:
      return {{"lattice", "velocity"}, {"chain", "wsl"}};
    case Command::kAbsorb:
      return {{"lattice", "velocity"}, {"chain", "grid"}};
    case Command::kVstMap:
      return {{"lattice", "scan"}, {"chain", "grid", "thermal", "pump", "tracking"}};
    case Command::kZak:
      if (has_path) return {{"path"}, {"topology"}};
      return {{"lattice"}, {"topology", "scan", "chain", "grid", "thermal", "pump", "tracking"}};
    case Command::kChern:
      return {{"path"}, {"topology"}};
    case Command::kWinding:
      return {{"path", "scan"}, {"chain", "grid", "thermal", "pump", "topology"}};
  }
  return {};
}

void check_blocks(const json& root, Command command) {
  const bool has_path = root.contains("path");
  if (command == Command::kZak && has_path && root.contains("lattice"))
    schema("command 'zak' takes either 'lattice' or 'path', not both");
  const BlockRule rule = rule_for(command, has_path);
  for (const auto& name : rule.required)
    if (!root.contains(name))
      schema("command '" + std::string(command_name(command)) + "' requires block '" + name + "'");
  for (const auto& item : root.items()) {
    const std::string& k = item.key();
    if (k == "command" || k == "output") continue;
    const bool known = std::count(rule.required.begin(), rule.required.end(), k) ||
                       std::count(rule.optional.begin(), rule.optional.end(), k);
    if (known) continue;
    static const std::set<std::string> kBlocks = {"lattice", "chain",   "grid",     "velocity",
                                                  "scan",    "thermal", "pump",     "dos",
                                                  "wsl",     "path",    "topology", "tracking"};
    if (kBlocks.count(k))
      schema("block '" + k + "' is not used by command '" + std::string(command_name(command)) +
             "'");
    schema("unknown key '" + k + "'");
  }
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const char* band_text(Band b) { return b == Band::kLower ? "lower" : "upper"; }

}  // namespace

std::string_view command_name(Command command) {
  switch (command) {
    case Command::kDos: return "dos";
    case Command::kWsl: return "wsl";
    case Command::kAbsorb: return "absorb";
    case Command::kVstMap: return "vst-map";
    case Command::kZak: return "zak";
    case Command::kChern: return "chern";
    case Command::kWinding: return "winding";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::kDos, Command::kWsl, Command::kAbsorb, Command::kVstMap,
                    Command::kZak, Command::kChern, Command::kWinding})
    if (command_name(c) == name) return c;
  schema("unknown command '" + std::string(name) +
         "' (expected dos, wsl, absorb, vst-map, zak, chern or winding)");
}

std::vector<double> ScanBlock::velocities() const {
  if (!range) return values;
  std::vector<double> out;
  const double span = (range->stop - range->start) / range->step;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) out.push_back(range->start + static_cast<double>(i) * range->step);
  return out;
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto colon = what.find(": ", what.find("parse error"));
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw Error(ErrorCategory::kConfigParse,
                "config parse error at " + line_column(text, e.byte) + ": " + what);
  }
  if (!root.is_object()) schema("config must be a JSON object");
  if (!root.contains("command")) schema("missing required key 'command'");
  if (!root["command"].is_string()) schema("'command' must be a string");

  RunConfig c;
  c.command = parse_command(root["command"].get<std::string>());
  check_blocks(root, c.command);
  if (root.contains("lattice")) c.lattice = read_lattice(root["lattice"]);
  if (root.contains("chain")) c.chain = read_chain(root["chain"]);
  if (root.contains("grid")) c.grid = read_grid(root["grid"]);
  if (root.contains("velocity")) c.velocity = read_velocity(root["velocity"]);
  if (root.contains("scan")) c.scan = read_scan(root["scan"]);
  if (root.contains("thermal")) c.thermal = read_thermal(root["thermal"]);
  if (root.contains("pump")) c.pump = read_pump(root["pump"]);
  if (root.contains("dos")) c.dos = read_dos(root["dos"]);
  if (root.contains("wsl")) c.wsl = read_wsl(root["wsl"]);
  if (root.contains("path")) c.path = read_path(root["path"]);
  if (root.contains("topology")) c.topology = read_topology(root["topology"]);
  if (root.contains("tracking")) c.tracking = read_tracking(root["tracking"]);
  if (root.contains("output")) c.output = read_output(root["output"]);
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open config file '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCategory::kIo, "cannot read config file '" + file.string() + "'");
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  ojson root;
  root["command"] = std::string(command_name(c.command));
  if (c.lattice) {
    const auto& p = *c.lattice;
    root["lattice"] = {{"t1", p.t1},         {"t2", p.t2},           {"delta", p.delta},
                       {"lambda", p.lambda}, {"gamma_a", p.gamma_a}, {"gamma_b", p.gamma_b}};
  }
  if (c.path) {
    const auto& p = *c.path;
    root["path"] = {{"A", p.path.A},
                    {"r", p.path.r},
                    {"B", p.path.B},
                    {"u", p.path.u},
                    {"lambda", p.optics.lambda},
                    {"gamma_a", p.optics.gamma_a},
                    {"gamma_b", p.optics.gamma_b}};
  }
  if (c.chain) root["chain"] = {{"n_sites", c.chain->n_sites}};
  if (c.grid) root["grid"] = {{"min", c.grid->min}, {"max", c.grid->max}, {"points", c.grid->points}};
  if (c.velocity) root["velocity"] = {{"v", c.velocity->v}};
  if (c.scan) {
    ojson s;
    if (c.scan->range)
      s["range"] = {{"start", c.scan->range->start},
                    {"stop", c.scan->range->stop},
                    {"step", c.scan->range->step}};
    else
      s["values"] = c.scan->values;
    s["source"] = c.scan->source == MapSource::kDifference ? "difference" : "direct";
    root["scan"] = s;
  }
  if (c.thermal) root["thermal"] = {{"fwhm", c.thermal->fwhm}, {"nodes", c.thermal->nodes}};
  if (c.pump)
    root["pump"] = {{"hole_fwhm", c.pump->hole_fwhm},
                    {"depth", c.pump->depth},
                    {"nodes_per_fwhm", c.pump->nodes_per_fwhm}};
  if (c.dos) root["dos"] = {{"samples", c.dos->samples}, {"broadening", c.dos->broadening}};
  if (c.wsl) root["wsl"] = {{"weight_floor", c.wsl->weight_floor}};
  if (c.topology) {
    const auto& t = *c.topology;
    ojson o;
    o["band"] = band_text(t.band);
    o["gauge"] = std::string(gauge_name(t.gauge));
    o["zak_points"] = t.zak_points;
    o["nx"] = t.nx;
    o["neta"] = t.neta;
    o["unwrap_samples"] = t.unwrap_samples;
    o["eta_steps"] = t.eta_steps;
    if (t.eta) o["eta"] = *t.eta;
    if (t.reference_velocity) o["reference_velocity"] = *t.reference_velocity;
    o["min_gap"] = t.min_gap;
    root["topology"] = o;
  }
  if (c.tracking)
    root["tracking"] = {{"min_overlap_fraction", c.tracking->min_overlap_fraction},
                        {"prominence", c.tracking->prominence}};
  root["output"] = {{"dir", c.output.dir},
                    {"svg", c.output.svg},
                    {"overlay_theory", c.output.overlay_theory},
                    {"color_scale", c.output.color_scale == ColorScale::kHeat ? "heat" : "gray"}};
  return root.dump(2) + "\n";
}

RunConfig resolve(const RunConfig& config) {
  RunConfig r = config;
  const BlockRule rule = rule_for(r.command, r.path.has_value());
  auto wants = [&](const char* name) {
    return std::count(rule.optional.begin(), rule.optional.end(), name) > 0;
  };
  const bool slope = r.command != Command::kZak || r.scan.has_value();
  if (wants("chain") && slope && !r.chain) r.chain = ChainBlock{};
  if (wants("grid") && slope && !r.grid) r.grid = FrequencyGrid{};
  if (wants("thermal") && slope && !r.thermal) r.thermal = ThermalBlock{};
  if (wants("pump") && slope && !r.pump) r.pump = PumpBlock{};
  if (wants("tracking") && slope && !r.tracking) r.tracking = TrackingBlock{};
  if (wants("dos") && !r.dos) r.dos = DosBlock{};
  if (wants("wsl") && !r.wsl) r.wsl = WslBlock{};
  if (wants("topology") && !r.topology) r.topology = TopologyBlock{};
  return r;
}

}  // namespace slvst
