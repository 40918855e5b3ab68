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

// CSV tables and the dataset file format.
//
// Dataset files have a header row with `t` (integer period), `y` (outcome),
// spend columns `x_<name>`, optional 0/1 dummy columns `d_<name>` and an
// optional informational `date` column.

#ifndef GPMMM_IO_CSV_HPP_
#define GPMMM_IO_CSV_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "gpmmm/dataset.hpp"

namespace gpmmm::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;  // 1-based source line of each row, when parsed
  std::string source;

  // Index of a header column, -1 if absent.
  int Column(const std::string& name) const;
  // Column parsed as numbers; throws SchemaError naming line and column.
  std::vector<double> Numbers(const std::string& name) const;
};

// Comma separated, double-quote escaping, no embedded newlines. Blank lines
// are skipped. Rows must match the header width. `source` names the input in
// diagnostics.
CsvTable ParseCsv(std::istream& in, const std::string& source = "<input>");
CsvTable ReadCsv(const std::string& path);

// Shortest representation that parses back to the same double.
std::string FormatNumber(double v);

void WriteCsv(std::ostream& out, const CsvTable& table);
void WriteCsv(const std::string& path, const CsvTable& table);

struct DatasetInfo {
  int periods = 0;
  std::vector<std::string> channels;
  std::vector<std::string> dummies;
  bool has_dates = false;
};

struct LoadOptions {
  // Centred simulated inputs; the dataset is marked signed_spend.
  bool allow_negative_spend = false;
};

// Loads and validates a dataset file. Throws SchemaError with line and
// column for bad cells, negative spend, non 0/1 dummies and gaps in t.
Dataset LoadDataset(const std::string& path, DatasetInfo* info = nullptr, const LoadOptions& options = {});
Dataset ParseDataset(std::istream& in, const std::string& source, DatasetInfo* info = nullptr,
                     const LoadOptions& options = {});

CsvTable DatasetTable(const Dataset& data);
void SaveDataset(const Dataset& data, const std::string& path);

struct SparseChannel {
  std::string channel;
  double active_share = 0.0;  // periods with positive spend
};

// Channels with positive spend in fewer than `threshold` of the periods
// become 0/1 dummies (1 where spend > 0) named after the channel.
std::vector<SparseChannel> ConvertSparseChannels(Dataset& data, double threshold = 0.10);

}  // namespace gpmmm::io

#endif  // GPMMM_IO_CSV_HPP_
