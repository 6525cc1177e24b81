#pragma once

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sep/io.hpp"

namespace sep {

struct SvgSeries {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal polyline chart, fixed 800x500 viewport. Deterministic output.
inline void write_svg_lines(const std::string& path, const std::vector<SvgSeries>& series,
                            const std::string& x_label, const std::string& y_label) {
  if (series.empty()) throw std::invalid_argument("write_svg_lines: no series");
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("write_svg_lines: ragged series");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_lo = x_hi = s.x[i];
        y_lo = y_hi = s.y[i];
        first = false;
      }
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;

  const double w = 800.0, h = 500.0, ml = 60.0, mr = 20.0, mt = 20.0, mb = 45.0;
  auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_svg_lines: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  out << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_lo + (x_hi - x_lo) * t / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * t / 4.0;
    out << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 18.0
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(xv) << "</text>\n";
    out << "<text x=\"" << ml - 6.0 << "\" y=\"" << py(yv) + 4.0
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(yv) << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2.0 << "\" y=\"" << h - 8.0
      << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << (mt + h - mb) / 2.0
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << (mt + h - mb) / 2.0 << ")\">" << y_label << "</text>\n";

  double legend_y = mt + 14.0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << px(s.x[i]) << ',' << py(s.y[i]);
    }
    out << "\"/>\n";
    out << "<line x1=\"" << w - mr - 150.0 << "\" y1=\"" << legend_y << "\" x2=\""
        << w - mr - 120.0 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << w - mr - 114.0 << "\" y=\"" << legend_y + 4.0
        << "\" font-size=\"12\">" << s.name << "</text>\n";
    legend_y += 18.0;
  }
  out << "</svg>\n";
}

}  // namespace sep
