#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lsdml {

struct Series {
  enum class Style { Line, Points, Bars };
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  Style style = Style::Line;
};

/// Minimal static chart. Nonpositive values are dropped on log axes.
struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
  std::optional<double> hline;  // dashed reference line
  std::optional<std::pair<double, double>> y_range;
};

std::string render_svg(const Plot& plot);

}  // namespace lsdml
