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

// simulate, megasim, separate and theory.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gpmmm/error.hpp"
#include "gpmmm/evaluation.hpp"
#include "gpmmm/random.hpp"
#include "gpmmm/separation.hpp"
#include "gpmmm/theory_checks.hpp"
#include "run.hpp"

namespace mmmgp {
namespace io = gpmmm::io;
namespace eval = gpmmm::eval;
namespace sim = gpmmm::sim;
namespace sep = gpmmm::sep;
namespace theory = gpmmm::theory;
using gpmmm::SchemaError;

namespace {

Json NullableNumber(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

int ParseLevel(const Json& v, const std::string& where) {
  if (v.is_number_integer() && v.get<int>() >= 0 && v.get<int>() <= 2) return v.get<int>();
  if (v.is_string())
    for (int l = 0; l < 3; ++l)
      if (v.get<std::string>() == eval::LevelName(l)) return l;
  throw SchemaError(where + ": expected low, medium, high or 0..2");
}

eval::Factor ParseFactor(const std::string& name, const std::string& where) {
  try {
    return eval::FactorFromString(name);
  } catch (const gpmmm::Error&) {
    throw SchemaError(where + ": unknown factor '" + name + "'");
  }
}

eval::SimulationSetting ParseCell(ObjectReader r, int id, int replicates, int periods, int holdout) {
  const std::string dgp = r.String("dgp", "nonlinear_gp");
  eval::SimulationSetting s;
  try {
    s = eval::MidSetting(sim::DgpKindFromString(dgp), id);
  } catch (const gpmmm::Error& e) {
    throw SchemaError(r.PathOf("dgp") + ": " + e.what());
  }
  if (r.Has("levels")) {
    const Json& levels = r.Raw("levels");
    if (!levels.is_object()) throw SchemaError(r.PathOf("levels") + ": expected an object");
    for (const auto& [name, v] : levels.items()) {
      const std::string where = r.PathOf("levels") + "." + name;
      s.SetLevel(ParseFactor(name, where), ParseLevel(v, where));
    }
  }
  if (r.Has("values")) {
    const Json& values = r.Raw("values");
    if (!values.is_object()) throw SchemaError(r.PathOf("values") + ": expected an object");
    for (const auto& [name, v] : values.items()) {
      const std::string where = r.PathOf("values") + "." + name;
      if (!v.is_number()) throw SchemaError(where + ": expected a number");
      s.value_override[static_cast<std::size_t>(ParseFactor(name, where))] = v.get<double>();
    }
  }
  s.replicates = r.Int("replicates", replicates);
  s.periods = r.Int("periods", periods);
  s.holdout = r.Int("holdout", holdout);
  if (r.Has("spend_level") && !r.Raw("spend_level").is_null()) s.spend_level = r.Number("spend_level", 0.0);
  r.Finish();
  if (s.replicates < 1 || s.holdout < 1 || s.periods <= s.holdout + 2)
    throw SchemaError(r.path() + ": need replicates >= 1, holdout >= 1 and periods > holdout + 2");
  return s;
}

Json CellToJson(const eval::SimulationSetting& s) {
  Json levels = Json::object(), values = Json::object();
  for (eval::Factor f : eval::kAllFactors) {
    levels[eval::ToString(f)] = eval::LevelName(s.Level(f));
    if (const auto& v = s.value_override[static_cast<std::size_t>(f)]) values[eval::ToString(f)] = *v;
  }
  Json j{{"dgp", sim::ToString(s.dgp)}, {"levels", levels}, {"values", values}};
  j["replicates"] = s.replicates;
  j["periods"] = s.periods;
  j["holdout"] = s.holdout;
  j["spend_level"] = s.spend_level ? Json(*s.spend_level) : Json(nullptr);
  return j;
}

Json Rmse(const sep::RmseSummary& r) {
  return Json{{"rmse", NullableNumber(r.rmse)}, {"lower", NullableNumber(r.lower)}, {"upper", NullableNumber(r.upper)}};
}

}  // namespace

void RunSimulate(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  const std::string generator = r.String("generator", "dgp");
  if (generator != "dgp" && generator != "intro" && generator != "sigmoid")
    throw SchemaError(r.PathOf("generator") + ": expected dgp, intro or sigmoid");
  const std::uint64_t seed = ctx.Seed(r, "seed", generator == "sigmoid" ? sim::kSigmoidDefaultSeed : 1);
  const std::string channel = r.String("channel", "spend");
  Json resolved{{"generator", generator}, {"seed", seed}, {"channel", channel}};

  sim::SimDataset data;
  if (generator == "dgp") {
    const sim::DgpSpec dgp = io::DgpFromJson(r.Child("dgp"));
    const sim::SpendingSpec spending = io::SpendingFromJson(r.Child("spending"));
    resolved["dgp"] = io::ToJson(dgp);
    resolved["spending"] = io::ToJson(spending);
    r.Finish();
    ctx.SetConfig(resolved);
    ctx.Stage("generate", [&] { data = sim::GenDataset(dgp, spending, seed); });
  } else if (generator == "intro") {
    const sim::IntroConfig intro = io::IntroFromJson(r.Child("intro"));
    resolved["intro"] = io::ToJson(intro);
    r.Finish();
    ctx.SetConfig(resolved);
    ctx.Stage("generate", [&] { data = sim::GenIntroExample(seed, intro); });
  } else {
    const sim::SigmoidConfig sigmoid = io::SigmoidFromJson(r.Child("sigmoid"));
    resolved["sigmoid"] = io::ToJson(sigmoid);
    r.Finish();
    ctx.SetConfig(resolved);
    ctx.Stage("generate", [&] { data = sim::GenSigmoidCase(seed, sigmoid); });
  }

  ctx.WriteCsv("dataset.csv", io::DatasetTable(data.ToDataset(channel)));
  io::CsvTable truth = Table({"t", "spend", "effect", "deterministic", "noise", "y"});
  for (std::size_t i = 0; i < data.periods.size(); ++i)
    truth.rows.push_back({std::to_string(data.periods[i]), Num(data.spend[i]), Num(data.effect[i]),
                          Num(data.deterministic[i]), Num(data.noise[i]), Num(data.outcome[i])});
  ctx.WriteCsv("truth.csv", truth);
  ctx.WriteJson("simulation.json", Json{{"schema_version", io::kSchemaVersion},
                                        {"document", "gpmmm.simulation"},
                                        {"generator", generator},
                                        {"seed", seed},
                                        {"periods", data.periods.size()},
                                        {"sigma", data.sigma},
                                        {"resolved_rho", data.resolved_rho},
                                        {"resolved_k", data.resolved_k},
                                        {"clamped", data.clamped},
                                        {"signed_spend", data.ToDataset(channel).signed_spend},
                                        {"log", data.log}});
}

void RunMegasim(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  ObjectReader o = r.Child("options");
  eval::MegasimOptions options = io::MegasimOptionsFromJson(o);
  if (ctx.arguments().contains("seed")) options.master_seed = ctx.arguments()["seed"].get<std::uint64_t>();
  if (ctx.arguments().contains("workers")) options.workers = ctx.arguments()["workers"].get<int>();
  const std::string grid_kind = r.String("grid", "cells");
  const int replicates = r.Int("replicates", 20);
  const int periods = r.Int("periods", 100);
  const int holdout = r.Int("holdout", 10);

  std::vector<eval::SimulationSetting> grid;
  if (grid_kind == "full") {
    grid = eval::FullGrid(replicates, periods, holdout);
  } else if (grid_kind == "cells") {
    if (!r.Has("cells")) throw SchemaError(r.PathOf("cells") + ": required when grid is cells");
    const Json& cells = r.Raw("cells");
    if (!cells.is_array() || cells.empty()) throw SchemaError(r.PathOf("cells") + ": expected a non-empty array");
    for (std::size_t i = 0; i < cells.size(); ++i)
      grid.push_back(ParseCell(ObjectReader(cells[i], r.PathOf("cells") + "[" + std::to_string(i) + "]"),
                               static_cast<int>(i), replicates, periods, holdout));
  } else {
    throw SchemaError(r.PathOf("grid") + ": expected full or cells");
  }
  r.Finish();

  Json resolved{{"options", io::ToJson(options)}, {"grid", grid_kind}, {"replicates", replicates},
                {"periods", periods}, {"holdout", holdout}};
  if (grid_kind == "cells") {
    Json cells = Json::array();
    for (const auto& s : grid) cells.push_back(CellToJson(s));
    resolved["cells"] = cells;
  }
  ctx.SetConfig(resolved);
  ctx.SetSeed(options.master_seed);

  eval::MegasimResult result;
  ctx.Stage("simulate", [&] { result = eval::Megasim(grid, options); });

  io::CsvTable records = Table({"setting_id", "replicate", "seed", "true_mse", "competing_mse", "true_lower",
                                "true_upper", "competing_lower", "competing_upper", "conflated", "valid", "error"});
  for (const auto& rec : result.records)
    records.rows.push_back({std::to_string(rec.setting_id), std::to_string(rec.replicate), std::to_string(rec.seed),
                            Num(rec.true_mse), Num(rec.competing_mse), Num(rec.true_lower), Num(rec.true_upper),
                            Num(rec.competing_lower), Num(rec.competing_upper), rec.conflated ? "1" : "0",
                            rec.valid ? "1" : "0", rec.error});
  ctx.WriteCsv("records.csv", records);

  std::vector<std::string> header{"setting_id", "dgp", "label"};
  for (eval::Factor f : eval::kAllFactors) header.push_back(eval::ToString(f));
  for (const char* h : {"valid", "invalid", "conflated", "rate", "diagnostics"}) header.push_back(h);
  io::CsvTable rates = Table(header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& s = grid[i];
    const auto& rate = result.rates[i];
    std::vector<std::string> row{std::to_string(s.id), sim::ToString(s.dgp), s.Label()};
    for (eval::Factor f : eval::kAllFactors) row.push_back(Num(s.Value(f)));
    row.push_back(std::to_string(rate.valid));
    row.push_back(std::to_string(rate.invalid));
    row.push_back(std::to_string(rate.conflated));
    row.push_back(rate.rate ? Num(*rate.rate) : "");
    row.push_back(rate.diagnostics);
    rates.rows.push_back(std::move(row));
  }
  ctx.WriteCsv("rates.csv", rates);

  Json warnings = Json::array();
  io::CsvTable regression = Table({"dgp", "term", "estimate", "std_error", "t", "p"});
  for (sim::DgpKind kind : {sim::DgpKind::kNonlinearGP, sim::DgpKind::kTimeVaryingGP, sim::DgpKind::kHill}) {
    int with_rate = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) with_rate += grid[i].dgp == kind && result.rates[i].rate.has_value();
    if (with_rate < 2) continue;
    ctx.Stage(std::string("regression_") + sim::ToString(kind), [&] {
      try {
        const eval::OlsTable t = eval::RateRegression(grid, result.rates, kind);
        for (const auto& row : t.rows)
          regression.rows.push_back(
              {sim::ToString(kind), row.name, Num(row.estimate), Num(row.std_error), Num(row.t), Num(row.p)});
        for (const auto& w : t.warnings) warnings.push_back(std::string(sim::ToString(kind)) + ": " + w);
        for (const auto& d : t.dropped) warnings.push_back(std::string(sim::ToString(kind)) + ": dropped " + d);
      } catch (const gpmmm::Error& e) {
        warnings.push_back(std::string(sim::ToString(kind)) + ": regression skipped: " + e.what());
      }
    });
  }
  ctx.WriteCsv("regression.csv", regression);

  Json any_major = Json::array();
  for (const auto& a : eval::SummarizeAnyMajor(grid, result.rates))
    any_major.push_back(Json{{"dgp", sim::ToString(a.dgp)},
                             {"settings", a.settings},
                             {"any", NullableNumber(a.any)},
                             {"major", NullableNumber(a.major)}});
  int valid = 0, invalid = 0, conflated = 0;
  for (const auto& rate : result.rates) {
    valid += rate.valid;
    invalid += rate.invalid;
    conflated += rate.conflated;
  }
  ctx.WriteJson("summary.json", Json{{"schema_version", io::kSchemaVersion},
                                     {"document", "gpmmm.megasim_summary"},
                                     {"settings", grid.size()},
                                     {"valid", valid},
                                     {"invalid", invalid},
                                     {"conflated", conflated},
                                     {"any_major", any_major},
                                     {"warnings", warnings}});
}

void RunSeparate(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  const std::uint64_t seed = ctx.Seed(r, "seed", 1);
  const int runs = r.Int("runs", 1);
  if (runs < 1) throw SchemaError(r.PathOf("runs") + ": must be at least 1");

  ObjectReader e = r.Child("environment");
  const std::string kind = e.String("kind", "log");
  Json env_json{{"kind", kind}};
  std::function<sep::Environment(std::uint64_t)> make;
  if (kind == "log") {
    const sep::LogEnvConfig c = io::LogEnvFromJson(e.Child("log"));
    env_json["log"] = io::ToJson(c);
    make = [c](std::uint64_t s) { return sep::LogEnvironment(s, c); };
  } else if (kind == "intro") {
    const sim::IntroConfig c = io::IntroFromJson(e.Child("intro"), sep::WithPeriods(48));
    env_json["intro"] = io::ToJson(c);
    make = [c](std::uint64_t s) { return sep::IntroEnvironment(s, c); };
  } else if (kind == "gp") {
    const sim::DgpSpec dgp = io::DgpFromJson(e.Child("dgp"));
    const sim::SpendingSpec spending = io::SpendingFromJson(e.Child("spending"));
    env_json["dgp"] = io::ToJson(dgp);
    env_json["spending"] = io::ToJson(spending);
    make = [dgp, spending](std::uint64_t s) { return sep::GpEnvironment(dgp, spending, s); };
  } else {
    throw SchemaError(e.PathOf("kind") + ": expected log, intro or gp");
  }
  e.Finish();
  const sep::SeparationConfig test = io::SeparationFromJson(r.Child("test"));
  r.Finish();
  ctx.SetConfig(Json{{"seed", seed}, {"runs", runs}, {"environment", env_json}, {"test", io::ToJson(test)}});

  io::CsvTable traj = Table({"run", "test_period", "period", "spend", "predicted_nl", "predicted_tv", "realized",
                             "separation", "nl_rmse", "nl_lower", "nl_upper", "tv_rmse", "tv_lower", "tv_upper",
                             "fired"});
  Json run_list = Json::array();
  std::vector<int> periods;
  int separated = 0, correct = 0;
  for (int run = 0; run < runs; ++run) {
    sep::SeparationTrajectory t;
    ctx.Stage("run_" + std::to_string(run), [&] {
      const sep::Environment env = make(gpmmm::DeriveSeed(seed, {static_cast<std::uint64_t>(run), 1}));
      t = sep::RunTest(env, test, gpmmm::DeriveSeed(seed, {static_cast<std::uint64_t>(run), 2}));
    });
    for (const auto& row : t.rows)
      traj.rows.push_back({std::to_string(run), std::to_string(row.test_period), std::to_string(row.period),
                           Num(row.spend), Num(row.predicted_nl), Num(row.predicted_tv), Num(row.realized),
                           Num(row.separation), Num(row.nl.rmse), Num(row.nl.lower), Num(row.nl.upper),
                           Num(row.tv.rmse), Num(row.tv.lower), Num(row.tv.upper), row.fired ? "1" : "0"});
    if (t.separation_period) ++separated;
    if (t.CorrectWinner()) {
      ++correct;
      periods.push_back(*t.separation_period);
    }
    run_list.push_back(Json{{"run", run},
                            {"environment", t.environment},
                            {"policy", sep::ToString(t.policy)},
                            {"rule", sep::ToString(t.rule)},
                            {"truth", t.truth_time_varying ? "time_varying" : "nonlinear"},
                            {"initial_nl", Rmse(t.initial_nl)},
                            {"initial_tv", Rmse(t.initial_tv)},
                            {"separation_period", t.separation_period ? Json(*t.separation_period) : Json(nullptr)},
                            {"winner", t.winner},
                            {"correct", t.CorrectWinner()},
                            {"status", t.status},
                            {"warnings", t.warnings}});
  }
  ctx.WriteCsv("trajectory.csv", traj);
  Json median = nullptr;
  if (!periods.empty()) {
    std::sort(periods.begin(), periods.end());
    const std::size_t n = periods.size();
    median = n % 2 ? Json(periods[n / 2]) : Json(0.5 * (periods[n / 2 - 1] + periods[n / 2]));
  }
  ctx.WriteJson("summary.json", Json{{"schema_version", io::kSchemaVersion},
                                     {"document", "gpmmm.separation_summary"},
                                     {"runs", runs},
                                     {"separated", separated},
                                     {"correct", correct},
                                     {"median_separation_period", median},
                                     {"trajectories", run_list}});
}

void RunTheory(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  const std::uint64_t seed = ctx.Seed(r, "seed", 1);
  const int workers = ctx.IntOverride(r, "workers", 1);
  const std::uint64_t demo_seed = r.Seed("demo_seed", theory::kMonotoneDemoSeed);
  const theory::MonotoneDemoConfig demo = io::MonotoneDemoFromJson(r.Child("demo"));
  r.Finish();
  if (workers < 1) throw SchemaError("config.workers: must be at least 1");
  ctx.SetConfig(Json{{"seed", seed}, {"workers", workers}, {"demo_seed", demo_seed}, {"demo", io::ToJson(demo)}});

  std::vector<theory::Check> checks;
  ctx.Stage("suite", [&] { checks = theory::RunSuite(seed, workers); });
  theory::MonotoneDemoReport rep;
  ctx.Stage("monotone_demo", [&] { rep = theory::MonotoneConflationDemo(demo_seed, demo); });

  Json check_list = Json::array();
  std::ostringstream txt;
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.passed;
    check_list.push_back(Json{{"name", c.name},
                              {"passed", c.passed},
                              {"value", NullableNumber(c.value)},
                              {"target", NullableNumber(c.target)},
                              {"tolerance", NullableNumber(c.tolerance)}});
    txt << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << Num(c.value) << " target=" << Num(c.target)
        << " tol=" << Num(c.tolerance) << '\n';
  }
  const bool demo_ok = rep.reconstruction_residual < 1e-9 && rep.conflated && rep.shuffled_residual > 1e-9;
  txt << (demo_ok ? "PASS " : "FAIL ") << "monotone_demo  seed=" << rep.seed << " attempts=" << rep.attempts
      << " reconstruction=" << Num(rep.reconstruction_residual) << " shuffled=" << Num(rep.shuffled_residual)
      << " nl_mse=" << Num(rep.nonlinear_mse) << " tv_mse=" << Num(rep.time_varying_mse)
      << " conflated=" << (rep.conflated ? "true" : "false") << '\n';
  ctx.WriteJson("theory.json", Json{{"schema_version", io::kSchemaVersion},
                                    {"document", "gpmmm.theory"},
                                    {"checks", check_list},
                                    {"all_passed", all},
                                    {"monotone_demo",
                                     Json{{"seed", rep.seed},
                                          {"attempts", rep.attempts},
                                          {"reconstruction_residual", NullableNumber(rep.reconstruction_residual)},
                                          {"shuffled_residual", NullableNumber(rep.shuffled_residual)},
                                          {"noise_floor", NullableNumber(rep.noise_floor)},
                                          {"nonlinear_mse", NullableNumber(rep.nonlinear_mse)},
                                          {"time_varying_mse", NullableNumber(rep.time_varying_mse)},
                                          {"conflated", rep.conflated},
                                          {"passed", demo_ok}}}});
  ctx.WriteText("theory.txt", txt.str());
  io::CsvTable mono = Table({"t", "spend", "beta"});
  for (std::size_t i = 0; i < rep.spend.size(); ++i)
    mono.rows.push_back({std::to_string(i + 1), Num(rep.spend[i]), Num(rep.beta[i])});
  ctx.WriteCsv("monotone.csv", mono);
}

}  // namespace mmmgp
