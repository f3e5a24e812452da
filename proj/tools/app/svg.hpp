#pragma once

#include <string>
#include <vector>

namespace kinexch::app {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Minimal line chart: axes with ticks, optional log scales, a legend.
/// Points that cannot be drawn (non-finite, or <= 0 on a log axis) are
/// skipped and break the polyline.
struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// `comment` is embedded verbatim as an XML comment after the root element.
std::string render_svg(const Chart& chart, const std::string& comment = {});

}  // namespace kinexch::app
