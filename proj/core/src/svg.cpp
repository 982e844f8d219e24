#include "kfp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace kfp {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
};

double transform(double v, bool log_scale) {
  if (!log_scale) return v;
  return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  std::vector<double> ticks;
  if (!(hi > lo)) {
    ticks.push_back(lo);
    return ticks;
  }
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  const double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 0.5 * step; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

std::string render_svg(const SvgChart& chart) {
  Range xr, yr;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("svg series '" + s.label + "': x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double tx = transform(s.x[i], chart.log_x);
      const double ty = transform(s.y[i], chart.log_y);
      if (std::isfinite(tx) && std::isfinite(ty)) {
        xr.include(tx);
        yr.include(ty);
      }
    }
  }
  if (!xr.valid()) {
    xr = {0.0, 1.0};
    yr = {0.0, 1.0};
  }
  if (xr.hi == xr.lo) {
    xr.lo -= 0.5;
    xr.hi += 0.5;
  }
  if (yr.hi == yr.lo) {
    yr.lo -= 0.5;
    yr.hi += 0.5;
  }
  const double pad_y = 0.05 * (yr.hi - yr.lo);
  yr.lo -= pad_y;
  yr.hi += pad_y;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double v) { return kMarginLeft + (v - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  const auto sy = [&](double v) {
    return kMarginTop + plot_h - (v - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
         fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         escape(chart.title) + "</text>\n";

  for (double t : nice_ticks(xr.lo, xr.hi, 6)) {
    const double px = sx(t);
    out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kMarginTop) + "\" x2=\"" + fmt(px) +
           "\" y2=\"" + fmt(kMarginTop + plot_h) + "\" stroke=\"#e0e0e0\"/>\n";
    const std::string label = chart.log_x ? ("1e" + fmt(t)) : fmt(t);
    out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kMarginTop + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + label +
           "</text>\n";
  }
  for (double t : nice_ticks(yr.lo, yr.hi, 6)) {
    const double py = sy(t);
    out += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
           fmt(kMarginLeft + plot_w) + "\" y2=\"" + fmt(py) + "\" stroke=\"#e0e0e0\"/>\n";
    const std::string label = chart.log_y ? ("1e" + fmt(t)) : fmt(t);
    out += "<text x=\"" + fmt(kMarginLeft - 6) + "\" y=\"" + fmt(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label +
           "</text>\n";
  }
  out += "<rect x=\"" + fmt(kMarginLeft) + "\" y=\"" + fmt(kMarginTop) + "\" width=\"" +
         fmt(plot_w) + "\" height=\"" + fmt(plot_h) +
         "\" fill=\"none\" stroke=\"#404040\"/>\n";
  out += "<text x=\"" + fmt(kMarginLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape(chart.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fmt(kMarginTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 " +
         fmt(kMarginTop + plot_h / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    std::string points;
    bool open = false;
    const auto flush = [&]() {
      if (open && !points.empty())
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      points.clear();
      open = false;
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double tx = transform(s.x[i], chart.log_x);
      const double ty = transform(s.y[i], chart.log_y);
      if (!std::isfinite(tx) || !std::isfinite(ty)) {
        flush();
        continue;
      }
      points += fmt(sx(tx)) + "," + fmt(sy(ty)) + " ";
      open = true;
    }
    flush();
    const double ly = kMarginTop + 14 + 16 * static_cast<double>(si);
    const double lx = kMarginLeft + plot_w - 150;
    out += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(lx + 18) +
           "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(lx + 24) + "\" y=\"" + fmt(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const SvgChart& chart, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << render_svg(chart);
}

}  // namespace kfp
