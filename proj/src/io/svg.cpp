#include "lobforge/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lobforge/errors.hpp"

namespace lobforge::io {

namespace {

constexpr double kW = 840.0, kH = 520.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 46.0, kBottom = 56.0;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& os, const std::string& title,
              const std::string& comment) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
     << "\">\n";
  if (!comment.empty()) os << "<!-- " << escape(comment) << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title)
     << "</text>\n";
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<SvgSeries>& series,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::string& comment) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (first) throw DegenerateFit("no data for chart");
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kW - kLeft - kRight);
  };
  auto sy = [&](double y) {
    return kH - kBottom - (y - ymin) / (ymax - ymin) * (kH - kTop - kBottom);
  };

  std::ostringstream os;
  open_svg(os, title, comment);

  // Axes with 5 ticks each.
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    os << "<line x1=\"" << sx(fx) << "\" y1=\"" << kTop << "\" x2=\"" << sx(fx)
       << "\" y2=\"" << kH - kBottom << "\" stroke=\"#ddd\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << sy(fy) << "\" x2=\""
       << kW - kRight << "\" y2=\"" << sy(fy) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << sx(fx) << "\" y=\"" << kH - kBottom + 16
       << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(fy) + 4
       << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 14
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (kTop + kH - kBottom) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (kTop + kH - kBottom) / 2 << ")\">" << escape(y_label) << "</text>\n";
  os << "</g>\n";

  double legend_y = kTop + 8;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i])) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << kW - kRight - 8 << "\" y=\"" << legend_y
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
       << s.color << "\">" << escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << os.str();
  if (!f) throw IoError("write failure on " + path);
}

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::vector<std::string>& labels,
                       const std::vector<double>& matrix_row_major,
                       const std::string& comment) {
  const std::size_t n = labels.size();
  if (matrix_row_major.size() != n * n)
    throw LengthMismatch("heat map needs an NxN matrix");

  const double grid = std::min((kW - kLeft - kRight) / n, (kH - kTop - kBottom) / n);
  std::ostringstream os;
  open_svg(os, title, comment);

  auto color = [](double v) {
    // -1 -> blue, 0 -> white, +1 -> red
    v = std::clamp(v, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (v >= 0) {
      g = b = static_cast<int>(std::lround(255 * (1.0 - v)));
    } else {
      r = g = static_cast<int>(std::lround(255 * (1.0 + v)));
    }
    std::ostringstream c;
    c << "rgb(" << r << ',' << g << ',' << b << ')';
    return c.str();
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = matrix_row_major[i * n + j];
      const double x = kLeft + j * grid, y = kTop + i * grid;
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << grid
         << "\" height=\"" << grid << "\" fill=\"" << color(v)
         << "\" stroke=\"#999\"/>\n";
      os << "<text x=\"" << x + grid / 2 << "\" y=\"" << y + grid / 2 + 4
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
         << std::fixed << std::setprecision(2) << v << "</text>\n";
      os.unsetf(std::ios::fixed);
    }
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + i * grid + grid / 2 + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << escape(labels[i]) << "</text>\n";
    os << "<text x=\"" << kLeft + i * grid + grid / 2 << "\" y=\""
       << kTop + n * grid + 14
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << escape(labels[i]) << "</text>\n";
  }
  os << "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << os.str();
  if (!f) throw IoError("write failure on " + path);
}

}  // namespace lobforge::io
