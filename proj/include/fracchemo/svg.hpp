#pragma once
// Self-contained deterministic SVG plots of CSV tables.
//   <col> or series:<col>   t against a column, linear axes
//   loglog:<col>            log-log with the fitted slope over the last decade of t
//   sweep:<col>             first column against <col>, log-log with the fitted slope

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "fracchemo/audits.hpp"
#include "fracchemo/csv.hpp"
#include "fracchemo/errors.hpp"

namespace fracchemo {

struct PlotSpec {
  enum class Style { series, loglog, sweep };
  Style style = Style::series;
  std::string column;
};

inline PlotSpec parse_plot_kind(const std::string& kind) {
  PlotSpec s;
  const auto colon = kind.find(':');
  if (colon == std::string::npos) {
    s.column = kind;
    return s;
  }
  const std::string style = kind.substr(0, colon);
  s.column = kind.substr(colon + 1);
  if (style == "series") s.style = PlotSpec::Style::series;
  else if (style == "loglog") s.style = PlotSpec::Style::loglog;
  else if (style == "sweep") s.style = PlotSpec::Style::sweep;
  else throw FormatError("unknown plot style '" + style + "' (expected series, loglog or sweep)");
  if (s.column.empty()) throw FormatError("plot kind '" + kind + "' names no column");
  return s;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace detail

struct PlotResult {
  std::string svg;
  bool has_fit = false;
  LinearFit fit;
};

/// Renders one plot of `table`. Unknown columns raise FormatError.
inline PlotResult render_plot(const Table& table, const std::string& kind) {
  const PlotSpec spec = parse_plot_kind(kind);
  if (table.columns.empty()) throw FormatError("table has no columns");
  const std::string xname = spec.style == PlotSpec::Style::sweep ? table.columns.front() : "t";
  const auto xs_all = table.values(xname);
  const auto ys_all = table.values(spec.column);
  const bool logs = spec.style != PlotSpec::Style::series;

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < xs_all.size(); ++i) {
    const double x = xs_all[i], y = ys_all[i];
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if (logs && (x <= 0.0 || y <= 0.0)) continue;
    xs.push_back(logs ? std::log10(x) : x);
    ys.push_back(logs ? std::log10(y) : y);
  }

  PlotResult res;
  if (logs && xs.size() >= 2) {
    std::vector<double> fx, fy;
    const double lo = spec.style == PlotSpec::Style::loglog ? xs.back() - 1.0 : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] >= lo - 1e-12) {
        fx.push_back(xs[i]);
        fy.push_back(ys[i]);
      }
    if (fx.size() >= 2) {
      res.fit = fit_line(fx, fy);
      res.has_fit = true;
    }
  }

  const double W = 640, H = 400, ml = 70, mr = 20, mt = 30, mb = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!xs.empty()) {
    x0 = *std::min_element(xs.begin(), xs.end());
    x1 = *std::max_element(xs.begin(), xs.end());
    y0 = *std::min_element(ys.begin(), ys.end());
    y1 = *std::max_element(ys.begin(), ys.end());
  }
  if (x1 - x0 <= 0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 <= 1e-300 * std::max(1.0, std::abs(y0))) { y0 -= 0.5 * std::max(1.0, std::abs(y0)); y1 += 0.5 * std::max(1.0, std::abs(y1)); }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto sy = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

  using detail::num;
  using detail::px;
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"" + px(ml) + "\" y=\"" + px(mt) + "\" width=\"" + px(W - ml - mr) + "\" height=\"" + px(H - mt - mb) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    const std::string xl = logs ? "1e" + num(xv) : num(xv), yl = logs ? "1e" + num(yv) : num(yv);
    s += "<text x=\"" + px(sx(xv)) + "\" y=\"" + px(H - mb + 18) + "\" text-anchor=\"middle\">" + detail::escape(xl) + "</text>\n";
    s += "<text x=\"" + px(ml - 6) + "\" y=\"" + px(sy(yv) + 4) + "\" text-anchor=\"end\">" + detail::escape(yl) + "</text>\n";
  }
  const std::string xlabel = logs ? "log10 " + xname : xname, ylabel = logs ? "log10 " + spec.column : spec.column;
  s += "<text x=\"" + px(ml + (W - ml - mr) / 2) + "\" y=\"" + px(H - 12) + "\" text-anchor=\"middle\">" + detail::escape(xlabel) + "</text>\n";
  s += "<text x=\"14\" y=\"" + px(mt + (H - mt - mb) / 2) + "\" transform=\"rotate(-90 14 " + px(mt + (H - mt - mb) / 2) +
       ")\" text-anchor=\"middle\">" + detail::escape(ylabel) + "</text>\n";
  s += "<text x=\"" + px(ml) + "\" y=\"20\">" + detail::escape(kind) + "</text>\n";
  if (!xs.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + px(sx(xs[i])) + "," + px(sy(ys[i]));
    s += "\"/>\n";
    if (spec.style == PlotSpec::Style::sweep)
      for (std::size_t i = 0; i < xs.size(); ++i)
        s += "<circle cx=\"" + px(sx(xs[i])) + "\" cy=\"" + px(sy(ys[i])) + "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
  }
  if (res.has_fit) {
    const double a = spec.style == PlotSpec::Style::loglog ? std::max(x0, x1 - 1.0) : x0;
    s += "<line x1=\"" + px(sx(a)) + "\" y1=\"" + px(sy(res.fit.intercept + res.fit.slope * a)) + "\" x2=\"" + px(sx(x1)) +
         "\" y2=\"" + px(sy(res.fit.intercept + res.fit.slope * x1)) + "\" stroke=\"#c0392b\" stroke-dasharray=\"6 3\"/>\n";
    s += "<text x=\"" + px(W - mr - 6) + "\" y=\"" + px(mt + 16) + "\" text-anchor=\"end\" fill=\"#c0392b\">slope " +
         num(res.fit.slope) + "</text>\n";
  }
  s += "</g>\n</svg>\n";
  res.svg = std::move(s);
  return res;
}

}  // namespace fracchemo
