#pragma once

#include <string>
#include <vector>

namespace treespde {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Static 640x480 polyline chart. log_x plots against log10(x); x must then be
// positive. Non-finite points break the polyline instead of distorting it.
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, bool log_x,
                          const std::vector<PlotSeries>& series);

}  // namespace treespde
