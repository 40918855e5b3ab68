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

// Shared plumbing for mmmgp subcommands: resolved configs, input digests,
// tracked outputs and the run manifest.

#ifndef GPMMM_TOOLS_MMMGP_RUN_HPP_
#define GPMMM_TOOLS_MMMGP_RUN_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpmmm/io/csv.hpp"
#include "gpmmm/io/json.hpp"
#include "gpmmm/io/manifest.hpp"

namespace mmmgp {

using gpmmm::io::Json;
using gpmmm::io::ObjectReader;

// Everything a run depends on. Replaying a manifest rebuilds this exactly.
struct Invocation {
  std::string command;
  Json arguments = Json::object();  // input paths and flag overrides
  Json config = Json::object();
  std::string out_dir;
};

class RunContext {
 public:
  explicit RunContext(const Invocation& inv);

  const Json& arguments() const { return arguments_; }
  // Required string argument; SchemaError when absent.
  std::string Argument(const std::string& key) const;
  std::vector<std::string> ArgumentList(const std::string& key) const;

  // Records the file's digest and returns its path.
  std::string Input(const std::string& path);

  // Config seed `key`, overridden by --seed. Becomes the manifest seed.
  std::uint64_t Seed(ObjectReader& r, const std::string& key, std::uint64_t fallback);
  void SetSeed(std::uint64_t seed) { manifest_.master_seed = seed; }
  // Config int `key`, overridden by the argument of the same name.
  int IntOverride(ObjectReader& r, const std::string& key, int fallback);

  void SetConfig(Json resolved);

  void WriteText(const std::string& name, const std::string& content);
  void WriteJson(const std::string& name, const Json& j);
  void WriteCsv(const std::string& name, const gpmmm::io::CsvTable& table);

  void Stage(const std::string& name, const std::function<void()>& fn);

  gpmmm::io::RunManifest Finish(int exit_status);

 private:
  std::string Path(const std::string& name) const;

  Json arguments_;
  std::string out_dir_;
  gpmmm::io::RunManifest manifest_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

using Handler = std::function<void(RunContext&, const Json&)>;

// Runs the command and writes config.json and manifest.json into out_dir.
// The manifest is written even when the command throws.
gpmmm::io::RunManifest Execute(const Invocation& inv);

struct ReplayOutcome {
  bool inputs_match = true;
  bool reproduced = false;
  std::string expected_digest;
  std::string actual_digest;
  std::vector<std::string> mismatches;
};

ReplayOutcome Replay(const std::string& manifest_path, const std::string& out_dir);

// Handlers, one per subcommand.
void RunSimulate(RunContext& ctx, const Json& config);
void RunFit(RunContext& ctx, const Json& config);
void RunEvaluate(RunContext& ctx, const Json& config);
void RunMegasim(RunContext& ctx, const Json& config);
void RunOptimize(RunContext& ctx, const Json& config);
void RunSeparate(RunContext& ctx, const Json& config);
void RunTheory(RunContext& ctx, const Json& config);
void RunPlot(RunContext& ctx, const Json& config);

// Table helpers.
std::string Num(double v);
gpmmm::io::CsvTable Table(std::vector<std::string> header);

}  // namespace mmmgp

#endif  // GPMMM_TOOLS_MMMGP_RUN_HPP_
