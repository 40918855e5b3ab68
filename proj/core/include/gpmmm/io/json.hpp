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

// Strict JSON documents: parse errors carry line and column, unknown keys
// are errors, and every reader can echo its fully resolved values.

#ifndef GPMMM_IO_JSON_HPP_
#define GPMMM_IO_JSON_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpmmm/dgp_sim.hpp"
#include "gpmmm/evaluation.hpp"
#include "gpmmm/mmm_models.hpp"
#include "gpmmm/separation.hpp"
#include "gpmmm/theory_checks.hpp"
#include "gpmmm/transforms.hpp"

namespace gpmmm::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Throws SchemaError "source: line L, column C: ..." on malformed input.
Json ParseJson(const std::string& text, const std::string& source = "<input>");
Json ReadJson(const std::string& path);
// Pretty printed with a trailing newline; byte-stable for equal content.
std::string DumpJson(const Json& j);
void WriteJson(const std::string& path, const Json& j);

// Reads keys of one JSON object. Finish() rejects keys that were never read.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  double Number(const std::string& key, double fallback);
  int Int(const std::string& key, int fallback);
  std::uint64_t Seed(const std::string& key, std::uint64_t fallback);
  bool Bool(const std::string& key, bool fallback);
  std::string String(const std::string& key, const std::string& fallback);
  std::vector<double> Numbers(const std::string& key, const std::vector<double>& fallback);
  std::vector<std::string> Strings(const std::string& key, const std::vector<std::string>& fallback);

  bool Has(const std::string& key) const;
  // The raw value; marks the key as read. Throws if absent.
  const Json& Raw(const std::string& key);
  // Sub-reader for a nested object; an absent key reads as an empty object.
  ObjectReader Child(const std::string& key);
  std::string PathOf(const std::string& key) const;
  const std::string& path() const { return path_; }

  void Finish() const;

 private:
  const Json* Find(const std::string& key);
  const Json& json_;
  std::string path_;
  std::set<std::string> read_;
};

// Rejects a document whose schema_version is present and unsupported.
void CheckSchemaVersion(ObjectReader& r);

transforms::StockSpec StockFromJson(ObjectReader r);
Json ToJson(const transforms::StockSpec& s);

mmm::InferenceSpec InferenceFromJson(ObjectReader r);
Json ToJson(const mmm::InferenceSpec& s);

// `kind` selects the base spec (nonlinear, time_varying, log_time_varying,
// hill) whose fields the remaining keys override.
mmm::ModelSpec ModelSpecFromJson(ObjectReader r);
Json ToJson(const mmm::ModelSpec& s);

sim::SpendingSpec SpendingFromJson(ObjectReader r, const sim::SpendingSpec& base = {});
Json ToJson(const sim::SpendingSpec& s);

sim::DgpSpec DgpFromJson(ObjectReader r);
Json ToJson(const sim::DgpSpec& s);

sim::IntroConfig IntroFromJson(ObjectReader r, const sim::IntroConfig& base = {});
Json ToJson(const sim::IntroConfig& c);

sim::SigmoidConfig SigmoidFromJson(ObjectReader r);
Json ToJson(const sim::SigmoidConfig& c);

sep::LogEnvConfig LogEnvFromJson(ObjectReader r);
Json ToJson(const sep::LogEnvConfig& c);

sep::SeparationConfig SeparationFromJson(ObjectReader r);
Json ToJson(const sep::SeparationConfig& c);

eval::MegasimOptions MegasimOptionsFromJson(ObjectReader r);
Json ToJson(const eval::MegasimOptions& o);

theory::MonotoneDemoConfig MonotoneDemoFromJson(ObjectReader r);
Json ToJson(const theory::MonotoneDemoConfig& c);

}  // namespace gpmmm::io

#endif  // GPMMM_IO_JSON_HPP_
