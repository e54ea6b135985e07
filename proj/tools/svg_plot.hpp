#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

// Minimal static line plot; the CSV output stays the data contract.
namespace darboux::tools {

struct Series {
  std::span<const double> y;
  std::string color;
  std::string label;
};

inline void write_svg(const std::string& path, std::span<const double> x, const std::vector<Series>& series,
                      const std::vector<double>& hlines = {}, const std::string& title = "") {
  const double w = 900, h = 420, pad = 50;
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (const auto& s : series) {
    for (double v : s.y) {
      if (std::isfinite(v)) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
      }
    }
  }
  for (double v : hlines) {
    ylo = std::min(ylo, v);
    yhi = std::max(yhi, v);
  }
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  const double margin = 0.05 * (yhi - ylo);
  ylo -= margin;
  yhi += margin;
  const double xlo = x.front(), xhi = x.back();
  auto px = [&](double v) { return pad + (v - xlo) / (xhi - xlo) * (w - 2 * pad); };
  auto py = [&](double v) { return h - pad - (v - ylo) / (yhi - ylo) * (h - 2 * pad); };

  std::ofstream os(path);
  char buf[96];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w - 2 * pad << "\" height=\"" << h - 2 * pad
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!title.empty()) os << "<text x=\"" << pad << "\" y=\"30\" font-size=\"14\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", ylo);
  os << "<text x=\"4\" y=\"" << h - pad << "\" font-size=\"11\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", yhi);
  os << "<text x=\"4\" y=\"" << pad + 10 << "\" font-size=\"11\">" << buf << "</text>\n";
  for (double v : hlines) {
    std::snprintf(buf, sizeof buf, "%.2f", py(v));
    os << "<line x1=\"" << pad << "\" x2=\"" << w - pad << "\" y1=\"" << buf << "\" y2=\"" << buf
       << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
  }
  int row = 0;
  for (const auto& s : series) {
    // Thin to at most ~2000 points per series.
    const std::size_t step = std::max<std::size_t>(1, s.y.size() / 2000);
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < s.y.size(); i += step) {
      if (!std::isfinite(s.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(s.y[i]));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << w - pad - 160 << "\" y=\"" << pad + 16 + 14 * row++ << "\" font-size=\"11\" fill=\""
       << s.color << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace darboux::tools
