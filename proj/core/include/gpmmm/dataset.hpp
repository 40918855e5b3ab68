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

#ifndef GPMMM_DATASET_HPP_
#define GPMMM_DATASET_HPP_

#include <string>
#include <vector>

namespace gpmmm {

// One named column of per-period values.
struct Column {
  std::string name;
  std::vector<double> values;
};

// Time-indexed marketing data: gapless integer periods, the outcome, spend
// channels and 0/1 dummy covariates.
struct Dataset {
  std::vector<int> periods;
  std::vector<double> outcome;
  std::vector<Column> channels;
  std::vector<Column> dummies;
  std::vector<std::string> dates;  // optional, informational
  // Allows negative channel values (centred simulated inputs).
  bool signed_spend = false;

  std::size_t size() const { return periods.size(); }
  std::size_t num_channels() const { return channels.size(); }

  // Throws SchemaError on length mismatch, gaps or negative spend (unless
  // signed_spend).
  void Validate() const;

  // Rows [begin, end).
  Dataset Slice(std::size_t begin, std::size_t end) const;

  const Column& Channel(const std::string& name) const;
};

}  // namespace gpmmm

#endif  // GPMMM_DATASET_HPP_
