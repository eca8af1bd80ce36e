#include "dmnls/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dmnls {

namespace {

constexpr Real kWidth = 640, kHeight = 480;
constexpr Real kLeft = 78, kRight = 616, kTop = 26, kBottom = 430;

std::string xml_escape(const std::string& s) {
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

std::string fmt(Real x, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

// Tick positions with a "nice" step (1/2/2.5/5 x 10^k) covering [lo, hi].
std::vector<Real> nice_ticks(Real lo, Real hi) {
  if (!(hi > lo)) return {lo};
  const Real raw = (hi - lo) / 4;
  const Real mag = std::pow(10, std::floor(std::log10(raw)));
  Real step = 10 * mag;
  for (Real cand : {1.0, 2.0, 2.5, 5.0})
    if (cand * mag >= raw) {
      step = cand * mag;
      break;
    }
  std::vector<Real> ticks;
  for (Real t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

std::string render_plot_svg(const ResultTable& table, const std::string& x_col, const std::string& y_col,
                            PlotScale scale, std::optional<Real> slope) {
  const int xi = table.column_index(x_col);
  const int yi = table.column_index(y_col);
  if (xi < 0) throw std::invalid_argument("plot: no column named '" + x_col + "'");
  if (yi < 0) throw std::invalid_argument("plot: no column named '" + y_col + "'");

  std::vector<std::pair<Real, Real>> pts;
  for (const auto& row : table.rows) {
    const Real x = row[xi], y = row[yi];
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if (scale == PlotScale::loglog && (x <= 0 || y <= 0))
      throw std::invalid_argument("plot: loglog needs positive values in '" + x_col + "' and '" + y_col + "'");
    pts.emplace_back(x, y);
  }
  if (pts.empty()) throw std::invalid_argument("plot: no plottable rows");
  std::sort(pts.begin(), pts.end());

  const auto tx = [&](Real v) { return scale == PlotScale::loglog ? std::log10(v) : v; };
  Real xlo = tx(pts.front().first), xhi = tx(pts.back().first);
  Real ylo = tx(pts.front().second), yhi = ylo;
  for (const auto& [x, y] : pts) {
    ylo = std::min(ylo, tx(y));
    yhi = std::max(yhi, tx(y));
  }
  const auto pad = [](Real& lo, Real& hi) {
    const Real w = hi - lo;
    if (w == 0) {
      lo -= std::max(Real(0.5), std::abs(lo) / 10);
      hi += std::max(Real(0.5), std::abs(hi) / 10);
    } else {
      lo -= 0.06 * w;
      hi += 0.06 * w;
    }
  };
  pad(xlo, xhi);
  pad(ylo, yhi);

  const auto px = [&](Real v) { return kLeft + (tx(v) - xlo) / (xhi - xlo) * (kRight - kLeft); };
  const auto py = [&](Real v) { return kBottom - (tx(v) - ylo) / (yhi - ylo) * (kBottom - kTop); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "  <rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kRight - kLeft << "\" height=\""
      << kBottom - kTop << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

  // ticks on the transformed axes; loglog labels show the original value
  const auto tick_label = [&](Real t) {
    return scale == PlotScale::loglog ? fmt(std::pow(10, t), "%.3g") : fmt(t, "%.4g");
  };
  for (Real t : nice_ticks(xlo, xhi)) {
    const Real X = kLeft + (t - xlo) / (xhi - xlo) * (kRight - kLeft);
    svg << "  <line x1=\"" << fmt(X) << "\" y1=\"" << kBottom << "\" x2=\"" << fmt(X) << "\" y2=\"" << kBottom + 5
        << "\" stroke=\"#333\"/>\n";
    svg << "  <text x=\"" << fmt(X) << "\" y=\"" << kBottom + 18
        << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" << xml_escape(tick_label(t))
        << "</text>\n";
  }
  for (Real t : nice_ticks(ylo, yhi)) {
    const Real Y = kBottom - (t - ylo) / (yhi - ylo) * (kBottom - kTop);
    svg << "  <line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(Y) << "\" x2=\"" << kLeft << "\" y2=\"" << fmt(Y)
        << "\" stroke=\"#333\"/>\n";
    svg << "  <text x=\"" << kLeft - 8 << "\" y=\"" << fmt(Y + 4)
        << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" << xml_escape(tick_label(t))
        << "</text>\n";
  }
  svg << "  <text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">" << xml_escape(x_col) << "</text>\n";
  svg << "  <text x=\"16\" y=\"" << (kTop + kBottom) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
      << (kTop + kBottom) / 2 << ")\">" << xml_escape(y_col) << "</text>\n";

  // fitted line first so markers sit on top
  if (slope && scale == PlotScale::loglog && pts.size() >= 2) {
    Real mx = 0, my = 0;
    for (const auto& [x, y] : pts) {
      mx += std::log10(x);
      my += std::log10(y);
    }
    mx /= pts.size();
    my /= pts.size();
    const Real b = my - *slope * mx;
    const Real y0 = b + *slope * xlo, y1 = b + *slope * xhi;
    const auto pyt = [&](Real t) { return kBottom - (t - ylo) / (yhi - ylo) * (kBottom - kTop); };
    svg << "  <line x1=\"" << kLeft << "\" y1=\"" << fmt(pyt(y0)) << "\" x2=\"" << kRight << "\" y2=\""
        << fmt(pyt(y1)) << "\" stroke=\"#d62728\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"/>\n";
    svg << "  <text x=\"" << kRight - 8 << "\" y=\"" << kTop + 18
        << "\" font-size=\"13\" text-anchor=\"end\" font-family=\"sans-serif\" fill=\"#d62728\">order &#8776; "
        << fmt(*slope, "%.2f") << "</text>\n";
  }

  if (pts.size() >= 2) {
    svg << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) svg << fmt(px(x)) << "," << fmt(py(y)) << " ";
    svg << "\"/>\n";
  }
  for (const auto& [x, y] : pts)
    svg << "  <circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
        << "\" r=\"3.5\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"1\"/>\n";

  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const ResultTable& table, const std::string& x_col, const std::string& y_col, PlotScale scale,
               const std::string& path, std::optional<Real> slope) {
  const std::string payload = render_plot_svg(table, x_col, y_col, scale, slope);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dmnls
