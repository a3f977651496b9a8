#pragma once

#include <string>
#include <vector>

namespace vbjs::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
};

/// Static SVG line plot. Non-positive values are dropped on log axes.
std::string render(const Plot& plot, int width = 640, int height = 420);

}  // namespace vbjs::svg
