// Copyright 2026 The gpmmm Authors
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

#include "gpmmm/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gpmmm/error.hpp"

namespace gpmmm::io {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
constexpr int kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void Add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool Empty() const { return lo > hi; }
  void Pad() {
    if (hi - lo < 1e-12) {
      const double d = std::max(1.0, std::abs(lo)) * 0.5;
      lo -= d;
      hi += d;
    }
  }
};

double NiceStep(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string RenderSvg(const SvgPlot& plot) {
  Range xr, yr;
  for (const SvgSeries& s : plot.series) {
    if (s.x.size() != s.y.size()) throw DomainError("series '" + s.name + "' has mismatched x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        xr.Add(s.x[i]);
        yr.Add(s.y[i]);
      }
  }
  for (const SvgBand& b : plot.bands) {
    if (b.x.size() != b.lower.size() || b.x.size() != b.upper.size())
      throw DomainError("band '" + b.name + "' has mismatched lengths");
    for (std::size_t i = 0; i < b.x.size(); ++i)
      if (std::isfinite(b.x[i]) && std::isfinite(b.lower[i]) && std::isfinite(b.upper[i])) {
        xr.Add(b.x[i]);
        yr.Add(b.lower[i]);
        yr.Add(b.upper[i]);
      }
  }
  if (xr.Empty() || yr.Empty()) throw DomainError("nothing finite to plot");
  xr.Pad();
  yr.Pad();

  const double pw = plot.width - kLeft - kRight, ph = plot.height - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
    << "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << plot.width << "\" height=\""
    << plot.height << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << plot.width << "\" height=\"" << plot.height << "\" fill=\"white\"/>\n";
  if (!plot.title.empty())
    o << "<text x=\"" << Fixed(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << Escape(plot.title) << "</text>\n";

  o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  const double xs = NiceStep(xr.hi - xr.lo), ys = NiceStep(yr.hi - yr.lo);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    o << "<line x1=\"" << Fixed(px(v)) << "\" y1=\"" << Fixed(kTop) << "\" x2=\"" << Fixed(px(v)) << "\" y2=\""
      << Fixed(kTop + ph) << "\" stroke=\"#eee\"/>\n"
      << "<text x=\"" << Fixed(px(v)) << "\" y=\"" << Fixed(kTop + ph + 16) << "\" text-anchor=\"middle\">" << Tick(v)
      << "</text>\n";
  }
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    o << "<line x1=\"" << Fixed(kLeft) << "\" y1=\"" << Fixed(py(v)) << "\" x2=\"" << Fixed(kLeft + pw) << "\" y2=\""
      << Fixed(py(v)) << "\" stroke=\"#eee\"/>\n"
      << "<text x=\"" << Fixed(kLeft - 6) << "\" y=\"" << Fixed(py(v) + 4) << "\" text-anchor=\"end\">" << Tick(v)
      << "</text>\n";
  }
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << Fixed(pw) << "\" height=\"" << Fixed(ph)
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  if (!plot.x_label.empty())
    o << "<text x=\"" << Fixed(kLeft + pw / 2) << "\" y=\"" << plot.height - 12 << "\" text-anchor=\"middle\">"
      << Escape(plot.x_label) << "</text>\n";
  if (!plot.y_label.empty())
    o << "<text x=\"16\" y=\"" << Fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << Fixed(kTop + ph / 2) << ")\">" << Escape(plot.y_label) << "</text>\n";
  o << "</g>\n";

  std::size_t color = 0;
  int legend = 0;
  auto legend_entry = [&](const std::string& name, const char* fill, bool box) {
    const double ly = kTop + 14 + 18 * legend++;
    const double lx = kLeft + pw + 14;
    if (box) {
      o << "<rect x=\"" << Fixed(lx) << "\" y=\"" << Fixed(ly - 8) << "\" width=\"16\" height=\"10\" fill=\"" << fill
        << "\" fill-opacity=\"0.25\"/>\n";
    } else {
      o << "<line x1=\"" << Fixed(lx) << "\" y1=\"" << Fixed(ly - 3) << "\" x2=\"" << Fixed(lx + 16) << "\" y2=\""
        << Fixed(ly - 3) << "\" stroke=\"" << fill << "\" stroke-width=\"2\"/>\n";
    }
    o << "<text x=\"" << Fixed(lx + 22) << "\" y=\"" << Fixed(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << Escape(name) << "</text>\n";
  };

  for (const SvgBand& b : plot.bands) {
    const char* fill = kPalette[color++ % std::size(kPalette)];
    std::string upper, lower;
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      if (!std::isfinite(b.x[i]) || !std::isfinite(b.lower[i]) || !std::isfinite(b.upper[i])) continue;
      upper += Fixed(px(b.x[i])) + "," + Fixed(py(b.upper[i])) + " ";
    }
    for (std::size_t i = b.x.size(); i-- > 0;) {
      if (!std::isfinite(b.x[i]) || !std::isfinite(b.lower[i]) || !std::isfinite(b.upper[i])) continue;
      lower += Fixed(px(b.x[i])) + "," + Fixed(py(b.lower[i])) + " ";
    }
    std::string pts = upper + lower;
    if (!pts.empty()) pts.pop_back();
    o << "<polygon points=\"" << pts << "\" fill=\"" << fill << "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
    legend_entry(b.name, fill, true);
  }
  for (const SvgSeries& s : plot.series) {
    const char* stroke = kPalette[color++ % std::size(kPalette)];
    if (s.points) {
      o << "<g fill=\"" << stroke << "\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          o << "<circle cx=\"" << Fixed(px(s.x[i])) << "\" cy=\"" << Fixed(py(s.y[i])) << "\" r=\"2.5\"/>\n";
      o << "</g>\n";
    } else {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          pts += Fixed(px(s.x[i])) + "," + Fixed(py(s.y[i])) + " ";
      if (!pts.empty()) pts.pop_back();
      o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
    }
    legend_entry(s.name, stroke, false);
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace gpmmm::io
