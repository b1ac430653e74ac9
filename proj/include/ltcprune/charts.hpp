#pragma once

// Minimal deterministic SVG rendering: line charts for loss/prediction
// histories and bar charts for causality scores. No external plotting
// dependency; output is plain XML.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ltcprune/errors.hpp"

namespace ltcprune {

struct ChartSeries {
  std::string label;
  std::vector<double> x, y;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
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

inline const char* chart_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % 6];
}

struct AxisRange {
  double lo = 0.0, hi = 1.0;
  double map(double v, double px_lo, double px_hi) const {
    const double t = (v - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
};

inline AxisRange pad_range(double lo, double hi) {
  if (!(hi > lo)) {  // degenerate span: widen symmetrically
    const double w = std::max(1.0, std::abs(lo));
    return {lo - 0.5 * w, hi + 0.5 * w};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

struct Frame {
  double w = 720, h = 420;
  double left = 70, right = 20, top = 40, bottom = 50;
  double x0() const { return left; }
  double x1() const { return w - right; }
  double y0() const { return h - bottom; }  // pixel y grows downward
  double y1() const { return top; }
};

inline void svg_open(std::string& out, const Frame& f, const std::string& title) {
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(f.w) +
         "\" height=\"" + svg_num(f.h) + "\" viewBox=\"0 0 " + svg_num(f.w) +
         " " + svg_num(f.h) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + svg_num(f.w) + "\" height=\"" +
         svg_num(f.h) + "\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_num(f.w / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" +
         xml_escape(title) + "</text>\n";
}

inline void svg_axes(std::string& out, const Frame& f, const AxisRange& xr,
                     const AxisRange& yr, const std::string& x_label,
                     const std::string& y_label) {
  out += "<line x1=\"" + svg_num(f.x0()) + "\" y1=\"" + svg_num(f.y0()) +
         "\" x2=\"" + svg_num(f.x1()) + "\" y2=\"" + svg_num(f.y0()) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + svg_num(f.x0()) + "\" y1=\"" + svg_num(f.y0()) +
         "\" x2=\"" + svg_num(f.x0()) + "\" y2=\"" + svg_num(f.y1()) +
         "\" stroke=\"black\"/>\n";
  char buf[64];
  auto label = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };
  out += "<text x=\"" + svg_num(f.x0()) + "\" y=\"" + svg_num(f.y0() + 18) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + label(xr.lo) +
         "</text>\n";
  out += "<text x=\"" + svg_num(f.x1()) + "\" y=\"" + svg_num(f.y0() + 18) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         label(xr.hi) + "</text>\n";
  out += "<text x=\"" + svg_num(f.x0() - 6) + "\" y=\"" + svg_num(f.y0()) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         label(yr.lo) + "</text>\n";
  out += "<text x=\"" + svg_num(f.x0() - 6) + "\" y=\"" + svg_num(f.y1() + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         label(yr.hi) + "</text>\n";
  out += "<text x=\"" + svg_num((f.x0() + f.x1()) / 2) + "\" y=\"" +
         svg_num(f.h - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" +
         xml_escape(x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + svg_num((f.y0() + f.y1()) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 " +
         svg_num((f.y0() + f.y1()) / 2) + ")\">" + xml_escape(y_label) +
         "</text>\n";
}

}  // namespace detail

inline std::string svg_line_chart(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<ChartSeries>& series) {
  std::size_t points = 0;
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw mismatch_error("svg_line_chart: series '" + s.label +
                           "' has mismatched x/y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        xlo = xhi = s.x[i];
        ylo = yhi = s.y[i];
        first = false;
      }
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
      ++points;
    }
  }
  if (points == 0) throw data_error("svg_line_chart: no finite points");

  const detail::Frame f;
  const detail::AxisRange xr = detail::pad_range(xlo, xhi);
  const detail::AxisRange yr = detail::pad_range(ylo, yhi);
  std::string out;
  detail::svg_open(out, f, title);
  detail::svg_axes(out, f, xr, yr, x_label, y_label);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.x.empty()) continue;
    out += "<polyline fill=\"none\" stroke=\"";
    out += detail::chart_color(si);
    out += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out += detail::svg_num(xr.map(s.x[i], f.x0(), f.x1()));
      out += ',';
      out += detail::svg_num(yr.map(s.y[i], f.y0(), f.y1()));
      out += ' ';
    }
    out += "\"/>\n";
    // legend swatch + label
    const double ly = f.y1() + 14.0 * static_cast<double>(si);
    out += "<line x1=\"" + detail::svg_num(f.x1() - 120) + "\" y1=\"" +
           detail::svg_num(ly) + "\" x2=\"" + detail::svg_num(f.x1() - 100) +
           "\" y2=\"" + detail::svg_num(ly) + "\" stroke=\"" +
           detail::chart_color(si) + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::svg_num(f.x1() - 94) + "\" y=\"" +
           detail::svg_num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::xml_escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline std::string svg_bar_chart(const std::string& title,
                                 const std::string& y_label,
                                 const std::vector<std::string>& labels,
                                 const std::vector<double>& values) {
  if (labels.size() != values.size())
    throw mismatch_error("svg_bar_chart: labels/values length mismatch");
  if (labels.empty()) throw data_error("svg_bar_chart: no bars");
  double vmax = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw data_error("svg_bar_chart: values must be finite and >= 0");
    vmax = std::max(vmax, v);
  }
  const detail::Frame f;
  const detail::AxisRange yr = detail::pad_range(0.0, vmax > 0 ? vmax : 1.0);
  std::string out;
  detail::svg_open(out, f, title);
  detail::svg_axes(out, f, {0.0, 1.0}, yr, "", y_label);

  const double span = f.x1() - f.x0();
  const double slot = span / static_cast<double>(labels.size());
  const double bar_w = slot * 0.6;
  char buf[64];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double cx = f.x0() + slot * (static_cast<double>(i) + 0.5);
    const double top = yr.map(values[i], f.y0(), f.y1());
    out += "<rect class=\"bar\" x=\"" + detail::svg_num(cx - bar_w / 2) +
           "\" y=\"" + detail::svg_num(top) + "\" width=\"" +
           detail::svg_num(bar_w) + "\" height=\"" +
           detail::svg_num(f.y0() - top) + "\" fill=\"" +
           detail::chart_color(i) + "\"/>\n";
    std::snprintf(buf, sizeof buf, "%.4g", values[i]);
    out += "<text x=\"" + detail::svg_num(cx) + "\" y=\"" +
           detail::svg_num(top - 4) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">" +
           buf + "</text>\n";
    out += "<text x=\"" + detail::svg_num(cx) + "\" y=\"" +
           detail::svg_num(f.y0() + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           detail::xml_escape(labels[i]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ltcprune
