#pragma once

#include <string>
#include <vector>

namespace lobforge::io {

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> y;
};

// Static line chart (PnL curves, fitted growth lines). comment, when set,
// is embedded as an XML comment for provenance.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<SvgSeries>& series,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::string& comment = "");

// Symmetric matrix heat map with labels; values expected in [-1, 1].
void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::vector<std::string>& labels,
                       const std::vector<double>& matrix_row_major,
                       const std::string& comment = "");

}  // namespace lobforge::io
