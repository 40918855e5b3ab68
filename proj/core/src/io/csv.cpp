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

#include "gpmmm/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "gpmmm/error.hpp"

namespace gpmmm::io {
namespace {

std::string Where(const CsvTable& t, std::size_t row, int col) {
  const int line = row < t.lines.size() ? t.lines[row] : static_cast<int>(row) + 2;
  return t.source + ": line " + std::to_string(line) + ", column " + std::to_string(col + 1);
}

std::vector<std::string> SplitLine(const std::string& line, const std::string& where) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"' && cell.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(cell);
      cell.clear();
      was_quoted = false;
    } else {
      cell += c;
    }
  }
  if (quoted) throw SchemaError(where + ": unterminated quote");
  out.push_back(cell);
  for (std::string& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return out;
}

bool ParseDouble(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  return r.ec == std::errc() && r.ptr == end;
}

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

int CsvTable::Column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::Numbers(const std::string& name) const {
  const int c = Column(name);
  if (c < 0) throw SchemaError(source + ": missing column '" + name + "'");
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!ParseDouble(rows[r][c], out[r]) || !std::isfinite(out[r]))
      throw SchemaError(Where(*this, r, c) + ": '" + rows[r][c] + "' is not a finite number");
  }
  return out;
}

CsvTable ParseCsv(std::istream& in, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::string line;
  int number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = source + ": line " + std::to_string(number);
    std::vector<std::string> cells = SplitLine(line, where);
    if (!have_header) {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].empty()) throw SchemaError(where + ", column " + std::to_string(i + 1) + ": empty header");
        if (!seen.insert(cells[i]).second)
          throw SchemaError(where + ", column " + std::to_string(i + 1) + ": duplicate header '" + cells[i] + "'");
      }
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw SchemaError(where + ": expected " + std::to_string(t.header.size()) + " cells, found " +
                        std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.lines.push_back(number);
  }
  if (!have_header) throw SchemaError(source + ": empty file");
  return t;
}

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  return ParseCsv(in, path);
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void WriteCsv(std::ostream& out, const CsvTable& table) {
  auto row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << Quote(cells[i]);
    out << '\n';
  };
  row(table.header);
  for (const auto& r : table.rows) row(r);
}

void WriteCsv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  WriteCsv(out, table);
  if (!out) throw Error("write failed: " + path);
}

Dataset ParseDataset(std::istream& in, const std::string& source, DatasetInfo* info, const LoadOptions& options) {
  const CsvTable t = ParseCsv(in, source);
  const int tc = t.Column("t"), yc = t.Column("y");
  if (tc < 0) throw SchemaError(source + ": missing required column 't'");
  if (yc < 0) throw SchemaError(source + ": missing required column 'y'");
  if (t.rows.empty()) throw SchemaError(source + ": no data rows");

  Dataset d;
  d.signed_spend = options.allow_negative_spend;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    int period = 0;
    const std::string& cell = t.rows[r][tc];
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), period);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
      throw SchemaError(Where(t, r, tc) + ": '" + cell + "' is not an integer period");
    if (r > 0) {
      if (period <= d.periods.back())
        throw SchemaError(Where(t, r, tc) + ": periods must be strictly increasing");
      if (period != d.periods.back() + 1)
        throw SchemaError(Where(t, r, tc) + ": period " + std::to_string(d.periods.back() + 1) + " is missing");
    }
    d.periods.push_back(period);
  }
  d.outcome = t.Numbers("y");

  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& h = t.header[c];
    if (static_cast<int>(c) == tc || static_cast<int>(c) == yc) continue;
    if (h == "date") {
      for (const auto& row : t.rows) d.dates.push_back(row[c]);
    } else if (h.rfind("x_", 0) == 0 && h.size() > 2) {
      std::vector<double> v = t.Numbers(h);
      if (!options.allow_negative_spend)
        for (std::size_t r = 0; r < v.size(); ++r)
          if (v[r] < 0.0) throw SchemaError(Where(t, r, static_cast<int>(c)) + ": negative spend " + t.rows[r][c]);
      d.channels.push_back({h.substr(2), std::move(v)});
    } else if (h.rfind("d_", 0) == 0 && h.size() > 2) {
      std::vector<double> v = t.Numbers(h);
      for (std::size_t r = 0; r < v.size(); ++r)
        if (v[r] != 0.0 && v[r] != 1.0)
          throw SchemaError(Where(t, r, static_cast<int>(c)) + ": dummy value must be 0 or 1");
      d.dummies.push_back({h.substr(2), std::move(v)});
    } else {
      throw SchemaError(source + ": line " + std::to_string(t.lines.empty() ? 1 : t.lines[0] - 1) + ", column " +
                        std::to_string(c + 1) + ": unknown column '" + h + "' (expected t, y, date, x_*, d_*)");
    }
  }
  d.Validate();
  if (info) {
    info->periods = static_cast<int>(d.size());
    info->channels.clear();
    info->dummies.clear();
    for (const auto& c : d.channels) info->channels.push_back(c.name);
    for (const auto& c : d.dummies) info->dummies.push_back(c.name);
    info->has_dates = !d.dates.empty();
  }
  return d;
}

Dataset LoadDataset(const std::string& path, DatasetInfo* info, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  return ParseDataset(in, path, info, options);
}

CsvTable DatasetTable(const Dataset& data) {
  CsvTable t;
  t.header = {"t"};
  if (!data.dates.empty()) t.header.push_back("date");
  t.header.push_back("y");
  for (const auto& c : data.channels) t.header.push_back("x_" + c.name);
  for (const auto& c : data.dummies) t.header.push_back("d_" + c.name);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<std::string> row{std::to_string(data.periods[i])};
    if (!data.dates.empty()) row.push_back(data.dates[i]);
    row.push_back(FormatNumber(data.outcome[i]));
    for (const auto& c : data.channels) row.push_back(FormatNumber(c.values[i]));
    for (const auto& c : data.dummies) row.push_back(FormatNumber(c.values[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void SaveDataset(const Dataset& data, const std::string& path) { WriteCsv(path, DatasetTable(data)); }

std::vector<SparseChannel> ConvertSparseChannels(Dataset& data, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("sparse threshold must lie in [0, 1]");
  std::vector<SparseChannel> out;
  std::vector<Column> kept;
  for (Column& c : data.channels) {
    int active = 0;
    for (double v : c.values) active += v > 0.0;
    const double share = data.size() ? static_cast<double>(active) / data.size() : 0.0;
    if (share < threshold) {
      Column d{c.name, std::vector<double>(c.values.size())};
      for (std::size_t i = 0; i < c.values.size(); ++i) d.values[i] = c.values[i] > 0.0 ? 1.0 : 0.0;
      data.dummies.push_back(std::move(d));
      out.push_back({c.name, share});
    } else {
      kept.push_back(std::move(c));
    }
  }
  data.channels = std::move(kept);
  return out;
}

}  // namespace gpmmm::io
