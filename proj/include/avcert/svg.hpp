#pragma once

#include <string>
#include <vector>

namespace avcert::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart with axes, tick labels and a legend.
std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series);

}  // namespace avcert::svg
