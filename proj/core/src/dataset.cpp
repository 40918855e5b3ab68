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

#include "gpmmm/dataset.hpp"

#include <cmath>

#include "gpmmm/error.hpp"

namespace gpmmm {

void Dataset::Validate() const {
  const std::size_t n = periods.size();
  if (outcome.size() != n) throw SchemaError("outcome length does not match periods");
  for (std::size_t i = 1; i < n; ++i) {
    if (periods[i] != periods[i - 1] + 1)
      throw SchemaError("period " + std::to_string(periods[i - 1] + 1) + " is missing");
  }
  for (double y : outcome)
    if (!std::isfinite(y)) throw SchemaError("outcome contains a non-finite value");
  for (const Column& c : channels) {
    if (c.values.size() != n) throw SchemaError("channel " + c.name + " has the wrong length");
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(c.values[i]) || (!signed_spend && c.values[i] < 0.0))
        throw SchemaError("channel " + c.name + " has negative or non-finite spend at period " +
                          std::to_string(periods[i]));
  }
  for (const Column& d : dummies) {
    if (d.values.size() != n) throw SchemaError("dummy " + d.name + " has the wrong length");
    for (double v : d.values)
      if (v != 0.0 && v != 1.0) throw SchemaError("dummy " + d.name + " is not 0/1");
  }
  if (!dates.empty() && dates.size() != n) throw SchemaError("date column has the wrong length");
}

Dataset Dataset::Slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw DomainError("dataset slice out of range");
  auto cut = [&](const auto& v) { return std::decay_t<decltype(v)>(v.begin() + begin, v.begin() + end); };
  Dataset out;
  out.periods = cut(periods);
  out.outcome = cut(outcome);
  for (const Column& c : channels) out.channels.push_back({c.name, cut(c.values)});
  for (const Column& d : dummies) out.dummies.push_back({d.name, cut(d.values)});
  if (!dates.empty()) out.dates = cut(dates);
  out.signed_spend = signed_spend;
  return out;
}

const Column& Dataset::Channel(const std::string& name) const {
  for (const Column& c : channels)
    if (c.name == name) return c;
  throw DomainError("no channel named " + name);
}

}  // namespace gpmmm
