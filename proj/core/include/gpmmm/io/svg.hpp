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

// Static SVG 1.1 line and scatter charts.

#ifndef GPMMM_IO_SVG_HPP_
#define GPMMM_IO_SVG_HPP_

#include <string>
#include <vector>

namespace gpmmm::io {

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool points = false;  // circles instead of one polyline
};

// A shaded interval such as a 95% band around beta(t).
struct SvgBand {
  std::string name;
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 480;
  std::vector<SvgBand> bands;
  std::vector<SvgSeries> series;
};

// Non-finite points are skipped. Throws DomainError on length mismatches or
// when nothing finite is left to draw.
std::string RenderSvg(const SvgPlot& plot);

}  // namespace gpmmm::io

#endif  // GPMMM_IO_SVG_HPP_
