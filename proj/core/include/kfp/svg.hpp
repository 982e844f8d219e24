#pragma once

#include <string>
#include <vector>

namespace kfp {

// Minimal static line-chart writer. One chart per file, multiple series,
// linear or log10 axes. Non-finite points break the polyline.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<SvgSeries> series;
};

std::string render_svg(const SvgChart& chart);
void write_svg(const SvgChart& chart, const std::string& path);

}  // namespace kfp
