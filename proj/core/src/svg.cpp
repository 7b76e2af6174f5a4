#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "slvst/errors.hpp"
#include "slvst/io.hpp"
#include "slvst/topology.hpp"

namespace slvst {
namespace {

constexpr double kLeft = 70.0, kRight = 20.0, kTop = 30.0, kBottom = 50.0;
constexpr std::size_t kMaxOverlayLines = 400;

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::string px(double x) { return fmt("%.2f", x); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

using Rgb = std::array<int, 3>;

Rgb colour(double t, ColorScale scale) {
  t = std::clamp(t, 0.0, 1.0);
  auto level = [](double x) { return static_cast<int>(std::lround(255.0 * std::clamp(x, 0.0, 1.0))); };
  if (scale == ColorScale::kGray) {
    const int g = level(1.0 - t);
    return {g, g, g};
  }
  // black -> red -> yellow -> white
  return {level(3.0 * t), level(3.0 * t - 1.0), level(3.0 * t - 2.0)};
}

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

// Cell boundaries halfway between samples; a single sample gets a unit cell.
std::vector<double> edges(const std::vector<double>& axis) {
  const std::size_t n = axis.size();
  std::vector<double> e(n + 1);
  if (n == 1) {
    e[0] = axis[0] - 0.5;
    e[1] = axis[0] + 0.5;
    return e;
  }
  for (std::size_t i = 1; i < n; ++i) e[i] = 0.5 * (axis[i - 1] + axis[i]);
  e[0] = axis[0] - (e[1] - axis[0]);
  e[n] = axis[n - 1] + (axis[n - 1] - e[n - 1]);
  return e;
}

std::string label(double x) { return fmt("%g", std::abs(x) < 1e-9 ? 0.0 : x); }

}  // namespace

std::vector<OverlayLine> theory_ladder_lines(const LatticeParams& params, double f_min,
                                             double f_max, double v_max) {
  validate(params);
  std::vector<OverlayLine> lines;
  if (!(v_max > 0.0)) return lines;
  const double per_v = 1.0 / params.lambda / kHzPerMHz;  // single-band spacing per m/s
  const double reach = std::max(std::abs(f_min), std::abs(f_max));
  if (min_band_gap(params) < kDegeneracyTolerance) {
    const long top = std::lround(std::ceil(reach / (per_v * v_max)));
    for (long n = -top; n <= top && lines.size() < kMaxOverlayLines; ++n)
      lines.push_back({0.0, static_cast<double>(n) * per_v});
    return lines;
  }
  constexpr std::size_t kSamples = 1024;
  for (Band band : {Band::kLower, Band::kUpper}) {
    double mean = 0.0;
    for (std::size_t j = 0; j < kSamples; ++j) {
      const BandPair e =
          band_energies(params, 0.5 * params.lambda * static_cast<double>(j) / kSamples);
      mean += band == Band::kLower ? e.lower : e.upper;
    }
    mean /= static_cast<double>(kSamples);
    const double theta = zak_wilson(params, band, kSamples, ZakGauge::kSitePosition).theta;
    const double frac = theta / kTwoPi;
    const double step = 2.0 * per_v * v_max;
    const long lo = static_cast<long>(std::floor((f_min - mean) / step - frac)) - 1;
    const long hi = static_cast<long>(std::ceil((f_max - mean) / step - frac)) + 1;
    for (long n = lo; n <= hi && lines.size() < kMaxOverlayLines; ++n)
      lines.push_back({mean, (static_cast<double>(n) + frac) * 2.0 * per_v});
  }
  return lines;
}

std::string heatmap_svg(const VstMap& map, const HeatmapStyle& style) {
  if (map.v_axis.empty() || map.f_axis.empty() || map.data.size() != map.v_axis.size())
    throw Error(ErrorCategory::kValidation, "cannot render an empty map");
  const double w = style.width, h = style.height;
  const double pw = w - kLeft - kRight, ph = h - kTop - kBottom;
  const auto fe = edges(map.f_axis);
  const auto ve = edges(map.v_axis);
  const double f_lo = fe.front(), f_hi = fe.back(), v_lo = ve.front(), v_hi = ve.back();
  auto xs = [&](double f) { return kLeft + (f - f_lo) / (f_hi - f_lo) * pw; };
  auto ys = [&](double v) { return kTop + ph - (v - v_lo) / (v_hi - v_lo) * ph; };

  double top = 0.0;
  for (const auto& row : map.data)
    for (double x : row) top = std::max(top, x);

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + px(w) +
       "\" height=\"" + px(h) + "\" viewBox=\"0 0 " + px(w) + " " + px(h) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + px(w) + "\" height=\"" + px(h) + "\" fill=\"#ffffff\"/>\n";
  if (!style.title.empty())
    s += "<text x=\"" + px(kLeft + 0.5 * pw) + "\" y=\"20\" font-family=\"sans-serif\" " +
         "font-size=\"14\" text-anchor=\"middle\">" + escape(style.title) + "</text>\n";

  s += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < map.v_axis.size(); ++i) {
    const auto& row = map.data[i];
    const double y0 = ys(ve[i + 1]), y1 = ys(ve[i]);
    std::size_t j = 0;
    while (j < row.size()) {
      const Rgb c = colour(top > 0.0 ? row[j] / top : 0.0, style.scale);
      std::size_t k = j + 1;
      while (k < row.size() && colour(top > 0.0 ? row[k] / top : 0.0, style.scale) == c) ++k;
      const double x0 = xs(fe[j]), x1 = xs(fe[k]);
      s += "<rect x=\"" + px(x0) + "\" y=\"" + px(y0) + "\" width=\"" + px(x1 - x0) +
           "\" height=\"" + px(y1 - y0) + "\" fill=\"" + hex(c) + "\"/>\n";
      j = k;
    }
  }
  s += "</g>\n";

  if (!style.overlay.empty()) {
    s += "<g stroke=\"#00bfff\" stroke-width=\"1\" stroke-dasharray=\"4,3\" fill=\"none\">\n";
    for (const auto& line : style.overlay) {
      double a = v_lo, b = v_hi;
      if (line.slope == 0.0) {
        if (line.e0 < f_lo || line.e0 > f_hi) continue;
      } else {
        double p = (f_lo - line.e0) / line.slope, q = (f_hi - line.e0) / line.slope;
        if (p > q) std::swap(p, q);
        a = std::max(a, p);
        b = std::min(b, q);
        if (!(b > a)) continue;
      }
      s += "<line x1=\"" + px(xs(line.e0 + line.slope * a)) + "\" y1=\"" + px(ys(a)) +
           "\" x2=\"" + px(xs(line.e0 + line.slope * b)) + "\" y2=\"" + px(ys(b)) + "\"/>\n";
    }
    s += "</g>\n";
  }

  s += "<g stroke=\"#000000\" fill=\"none\">\n";
  s += "<rect x=\"" + px(kLeft) + "\" y=\"" + px(kTop) + "\" width=\"" + px(pw) +
       "\" height=\"" + px(ph) + "\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = kLeft + pw * t / 4.0, y = kTop + ph * t / 4.0;
    s += "<line x1=\"" + px(x) + "\" y1=\"" + px(kTop + ph) + "\" x2=\"" + px(x) + "\" y2=\"" +
         px(kTop + ph + 5) + "\"/>\n";
    s += "<line x1=\"" + px(kLeft - 5) + "\" y1=\"" + px(y) + "\" x2=\"" + px(kLeft) +
         "\" y2=\"" + px(y) + "\"/>\n";
  }
  s += "</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double f = f_lo + (f_hi - f_lo) * t / 4.0;
    const double v = v_hi - (v_hi - v_lo) * t / 4.0;
    s += "<text x=\"" + px(kLeft + pw * t / 4.0) + "\" y=\"" + px(kTop + ph + 18) +
         "\" text-anchor=\"middle\">" + label(f) + "</text>\n";
    s += "<text x=\"" + px(kLeft - 8) + "\" y=\"" + px(kTop + ph * t / 4.0 + 4) +
         "\" text-anchor=\"end\">" + label(v) + "</text>\n";
  }
  s += "<text x=\"" + px(kLeft + 0.5 * pw) + "\" y=\"" + px(h - 10) +
       "\" text-anchor=\"middle\">detuning (MHz)</text>\n";
  s += "<text x=\"15\" y=\"" + px(kTop + 0.5 * ph) + "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
       px(kTop + 0.5 * ph) + ")\">velocity (m/s)</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

void render_heatmap_svg(const VstMap& map, const std::filesystem::path& file,
                        const HeatmapStyle& style) {
  write_text(file, heatmap_svg(map, style));
}

}  // namespace slvst
