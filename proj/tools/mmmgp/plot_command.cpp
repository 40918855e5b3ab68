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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "gpmmm/error.hpp"
#include "gpmmm/io/svg.hpp"
#include "run.hpp"

namespace mmmgp {
namespace io = gpmmm::io;
using gpmmm::SchemaError;

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Empty cells and "nan" read as missing; anything else non-numeric fails.
std::optional<std::vector<double>> Lenient(const io::CsvTable& t, int col) {
  std::vector<double> out;
  for (const auto& row : t.rows) {
    const std::string& c = row[col];
    if (c.empty() || c == "nan") {
      out.push_back(kMissing);
      continue;
    }
    double v = 0.0;
    const auto r = std::from_chars(c.data(), c.data() + c.size(), v);
    if (r.ec != std::errc() || r.ptr != c.data() + c.size()) return std::nullopt;
    out.push_back(v);
  }
  return out;
}

std::vector<double> Required(const io::CsvTable& t, const std::string& name, const std::string& where) {
  const int c = t.Column(name);
  if (c < 0) throw SchemaError(where + ": no column '" + name + "' in " + t.source);
  auto v = Lenient(t, c);
  if (!v) throw SchemaError(where + ": column '" + name + "' is not numeric");
  return *v;
}

}  // namespace

void RunPlot(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  const std::string path = ctx.Input(ctx.Argument("csv"));
  const io::CsvTable t = io::ReadCsv(path);
  if (t.header.empty()) throw SchemaError(path + ": no columns");

  const std::string x = r.String("x", t.Column("t") >= 0 ? "t" : t.header[0]);
  const std::string group = r.String("group", "");
  std::vector<std::string> ys = r.Strings("y", {});
  const std::vector<std::string> points = r.Strings("points", {});
  const bool bands = r.Bool("bands", true);
  io::SvgPlot plot;
  plot.title = r.String("title", path);
  plot.x_label = r.String("x_label", x);
  plot.y_label = r.String("y_label", "");
  plot.width = r.Int("width", plot.width);
  plot.height = r.Int("height", plot.height);
  const std::string output = r.String("output", "plot.svg");
  r.Finish();
  if (plot.width < 200 || plot.height < 150) throw SchemaError("config: width >= 200 and height >= 150 required");
  if (output.empty() || output.find('/') != std::string::npos || output == "manifest.json" || output == "config.json")
    throw SchemaError("config.output: expected a plain file name");
  if (!group.empty() && t.Column(group) < 0) throw SchemaError("config.group: no column '" + group + "'");

  if (ys.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      const std::string& h = t.header[c];
      if (h == x || h == group || EndsWith(h, "_lower") || EndsWith(h, "_upper")) continue;
      if (Lenient(t, static_cast<int>(c))) ys.push_back(h);
    }
    if (ys.empty()) throw SchemaError(path + ": no numeric columns to plot besides '" + x + "'");
  }
  ctx.SetConfig(Json{{"x", x},
                     {"group", group},
                     {"y", ys},
                     {"points", points},
                     {"bands", bands},
                     {"title", plot.title},
                     {"x_label", plot.x_label},
                     {"y_label", plot.y_label},
                     {"width", plot.width},
                     {"height", plot.height},
                     {"output", output}});
  ctx.SetSeed(0);

  const std::vector<double> xv = Required(t, x, "config.x");
  std::vector<std::string> groups{""};
  std::vector<std::size_t> row_group(t.rows.size(), 0);
  if (!group.empty()) {
    groups.clear();
    std::map<std::string, std::size_t> index;
    const int gc = t.Column(group);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto [it, fresh] = index.emplace(t.rows[i][gc], groups.size());
      if (fresh) groups.push_back(t.rows[i][gc]);
      row_group[i] = it->second;
    }
  }
  auto pick = [&](const std::vector<double>& v, std::size_t g) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (row_group[i] == g) out.push_back(v[i]);
    return out;
  };

  for (const std::string& y : ys) {
    const std::vector<double> yv = Required(t, y, "config.y");
    const bool as_points = std::find(points.begin(), points.end(), y) != points.end();
    const bool has_band = bands && t.Column(y + "_lower") >= 0 && t.Column(y + "_upper") >= 0;
    std::vector<double> lo, hi;
    if (has_band) {
      lo = Required(t, y + "_lower", "band");
      hi = Required(t, y + "_upper", "band");
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::string name = groups[g].empty() ? y : groups[g] + " " + y;
      if (has_band) plot.bands.push_back({name + " 95%", pick(xv, g), pick(lo, g), pick(hi, g)});
      plot.series.push_back({name, pick(xv, g), pick(yv, g), as_points});
    }
  }
  std::string svg;
  ctx.Stage("render", [&] { svg = io::RenderSvg(plot); });
  ctx.WriteText(output, svg);
}

}  // namespace mmmgp
