#pragma once

// Deterministic SVG line charts from CSV columns, for quick looks at
// experiment outputs without an external plotting stack.

#include <optional>
#include <string>

#include "otcert/csv.hpp"

namespace otcert {

struct PlotSpec {
  std::string x;
  std::string y;
  /// Rows sharing this column's value form one series.
  std::optional<std::string> group;
  /// Symmetric error bars.
  std::optional<std::string> error;
  bool log_x = false;
  bool log_y = false;
  std::string title;
  int width = 720;
  int height = 480;
};

/// Series points are sorted by x; nonpositive values are dropped on log axes.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

}  // namespace otcert
