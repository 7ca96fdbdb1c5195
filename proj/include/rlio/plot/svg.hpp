// Copyright 2026, the rlio project contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// \file svg.hpp
/// \brief Minimal static line plots as SVG, for the experiment artifacts.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlio {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

inline const char* plot_palette(std::size_t i) {
  static const char* colors[] = {"#333333", "#d62728", "#1f77b4",
                                 "#2ca02c", "#ff7f0e", "#9467bd"};
  return colors[i % 6];
}

inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<PlotSeries>& series,
                           int width = 860, int height = 520) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);

  double x_min = 1e308, x_max = -1e308, y_min = 1e308, y_max = -1e308;
  for (const auto& s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_min > x_max) {
    x_min = 0.0;
    x_max = 1.0;
  }
  if (y_min > y_max) {
    y_min = 0.0;
    y_max = 1.0;
  }
  if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
  const double x_pad = 0.03 * (x_max - x_min);
  const double y_pad = 0.06 * (y_max - y_min);
  x_min -= x_pad;
  x_max += x_pad;
  y_min -= y_pad;
  y_max += y_pad;

  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * pw; };
  const auto sy = [&](double v) {
    return mt + ph - (v - y_min) / (y_max - y_min) * ph;
  };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-size=\"16\">" << title << "</text>\n";

  // axes + grid with 6 ticks per axis
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
     << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double fx = x_min + (x_max - x_min) * k / 5.0;
    const double fy = y_min + (y_max - y_min) * k / 5.0;
    os << "<line x1=\"" << sx(fx) << "\" y1=\"" << mt << "\" x2=\"" << sx(fx)
       << "\" y2=\"" << mt + ph << "\" stroke=\"#eee\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml + pw
       << "\" y2=\"" << sy(fy) << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << sx(fx) << "\" y=\"" << mt + ph + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << num(fx)
       << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << sy(fy) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << num(fy) << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 14
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << mt + ph / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << mt + ph / 2 << ")\">" << y_label << "</text>\n";

  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.4\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
    }
    os << "\"/>\n";
  }

  double ly = mt + 14;
  for (const auto& s : series) {
    os << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
       << ml + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << ml + 40 << "\" y=\"" << ly
       << "\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
}

}  // namespace rlio
