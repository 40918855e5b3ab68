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

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "gpmmm/error.hpp"
#include "run.hpp"

namespace {

using mmmgp::Json;

struct Common {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
};

void AddCommon(CLI::App* sub, Common& c, bool with_seed) {
  sub->add_option("--config,-c", c.config, "JSON config file; absent keys take defaults")->check(CLI::ExistingFile);
  sub->add_option("--out,-o", c.out, "Output directory")->required();
  if (with_seed) sub->add_option("--seed", c.seed, "Master seed, overrides the config")->check(CLI::NonNegativeNumber);
}

int Fail(int code, const std::string& msg) {
  std::cerr << "mmmgp: " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process marketing mix models: simulation, fitting, conflation and separation studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MMMGP_VERSION);

  Common common;
  std::string data, csv, manifest;
  std::vector<std::string> models;
  int workers = -1;

  CLI::App* simulate = app.add_subcommand("simulate", "Generate a dataset and its ground truth");
  AddCommon(simulate, common, true);
  CLI::App* fit = app.add_subcommand("fit", "Fit a model to a dataset");
  AddCommon(fit, common, true);
  fit->add_option("--data,-d", data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  CLI::App* evaluate = app.add_subcommand("evaluate", "Holdout RMSE of two models and the conflation label");
  AddCommon(evaluate, common, true);
  evaluate->add_option("--data,-d", data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  CLI::App* megasim = app.add_subcommand("megasim", "Run a grid of simulation settings");
  AddCommon(megasim, common, true);
  megasim->add_option("--workers", workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  CLI::App* optimize = app.add_subcommand("optimize", "Optimal spend under fitted models");
  AddCommon(optimize, common, false);
  optimize->add_option("--model,-m", models, "Saved model (repeatable)")->check(CLI::ExistingFile);
  CLI::App* separate = app.add_subcommand("separate", "Adaptive separation tests");
  AddCommon(separate, common, true);
  CLI::App* theory = app.add_subcommand("theory", "Identity checks and the monotone conflation demo");
  AddCommon(theory, common, true);
  theory->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  CLI::App* plot = app.add_subcommand("plot", "Render a CSV as an SVG chart");
  AddCommon(plot, common, false);
  plot->add_option("csv", csv, "CSV file")->required()->check(CLI::ExistingFile);
  CLI::App* replay = app.add_subcommand("replay", "Re-run a manifest and compare result digests");
  replay->add_option("manifest", manifest, "manifest.json of a previous run")->required()->check(CLI::ExistingFile);
  replay->add_option("--out,-o", common.out, "Output directory for the re-run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (replay->parsed()) {
      const mmmgp::ReplayOutcome r = mmmgp::Replay(manifest, common.out);
      for (const auto& m : r.mismatches) std::cerr << "mmmgp: " << m << '\n';
      if (!r.inputs_match) return Fail(1, "inputs changed since the recorded run");
      std::cout << (r.reproduced ? "reproduced " : "MISMATCH expected ") << r.expected_digest;
      if (!r.reproduced) std::cout << " found " << r.actual_digest;
      std::cout << '\n';
      return r.reproduced ? 0 : 1;
    }

    mmmgp::Invocation inv;
    inv.command = app.get_subcommands().front()->get_name();
    inv.out_dir = common.out;
    if (!common.config.empty()) inv.config = gpmmm::io::ReadJson(common.config);
    if (!inv.config.is_object()) throw gpmmm::SchemaError(common.config + ": expected a JSON object");
    if (common.seed >= 0) inv.arguments["seed"] = static_cast<std::uint64_t>(common.seed);
    if (workers >= 0) inv.arguments["workers"] = workers;
    if (!data.empty()) inv.arguments["data"] = data;
    if (!csv.empty()) inv.arguments["csv"] = csv;
    if (!models.empty()) inv.arguments["model"] = models;
    const gpmmm::io::RunManifest m = mmmgp::Execute(inv);
    std::cout << inv.command << ": wrote " << m.outputs.size() << " files to " << inv.out_dir << " (result "
              << m.ResultDigest().substr(0, 16) << ")\n";
    return 0;
  } catch (const gpmmm::SchemaError& e) {
    return Fail(1, e.what());
  } catch (const gpmmm::DomainError& e) {
    return Fail(1, e.what());
  } catch (const gpmmm::InfeasibleError& e) {
    return Fail(1, e.what());
  } catch (const std::exception& e) {
    return Fail(2, std::string("internal error: ") + e.what());
  }
}
