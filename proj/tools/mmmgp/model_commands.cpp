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

// fit, evaluate and optimize.

#include <algorithm>
#include <cmath>
#include <optional>

#include "gpmmm/budget_opt.hpp"
#include "gpmmm/error.hpp"
#include "gpmmm/evaluation.hpp"
#include "gpmmm/io/model_io.hpp"
#include "gpmmm/random.hpp"
#include "run.hpp"

namespace mmmgp {
namespace io = gpmmm::io;
namespace mmm = gpmmm::mmm;
namespace eval = gpmmm::eval;
namespace opt = gpmmm::opt;
using gpmmm::Dataset;
using gpmmm::SchemaError;

namespace {

Json NullableNumber(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct DataOptions {
  bool allow_negative_spend = false;
  std::optional<double> sparse_threshold;
};

DataOptions ReadDataOptions(ObjectReader r) {
  DataOptions o;
  o.allow_negative_spend = r.Bool("allow_negative_spend", false);
  if (r.Has("sparse_threshold") && !r.Raw("sparse_threshold").is_null())
    o.sparse_threshold = r.Number("sparse_threshold", 0.10);
  r.Finish();
  return o;
}

Json ToJson(const DataOptions& o) {
  return Json{{"allow_negative_spend", o.allow_negative_spend},
              {"sparse_threshold", o.sparse_threshold ? Json(*o.sparse_threshold) : Json(nullptr)}};
}

Dataset LoadData(RunContext& ctx, const DataOptions& o, std::vector<io::SparseChannel>* sparse,
                 io::DatasetInfo* info) {
  io::LoadOptions lo;
  lo.allow_negative_spend = o.allow_negative_spend;
  Dataset d = io::LoadDataset(ctx.Input(ctx.Argument("data")), info, lo);
  if (o.sparse_threshold) *sparse = io::ConvertSparseChannels(d, *o.sparse_threshold);
  return d;
}

void AddSparseDummies(mmm::ModelSpec& spec, const std::vector<io::SparseChannel>& sparse) {
  for (const auto& s : sparse)
    if (std::find(spec.dummies.begin(), spec.dummies.end(), s.channel) == spec.dummies.end())
      spec.dummies.push_back(s.channel);
}

Json SparseJson(const std::vector<io::SparseChannel>& sparse) {
  Json out = Json::array();
  for (const auto& s : sparse) out.push_back(Json{{"channel", s.channel}, {"active_share", s.active_share}});
  return out;
}

Json HoldoutJson(const eval::HoldoutResult& h) {
  return Json{{"model", h.model},
              {"valid", h.valid},
              {"mse", NullableNumber(h.mse)},
              {"rmse", NullableNumber(h.rmse)},
              {"rmse_mean", NullableNumber(h.rmse_mean)},
              {"lower", NullableNumber(h.lower)},
              {"upper", NullableNumber(h.upper)},
              {"error", h.error}};
}

std::vector<std::vector<double>> NestedNumbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw SchemaError(where + "[" + std::to_string(i) + "]: expected an array");
    std::vector<double> row;
    for (const Json& v : j[i]) {
      if (!v.is_number()) throw SchemaError(where + "[" + std::to_string(i) + "]: expected numbers");
      row.push_back(v.get<double>());
    }
    out.push_back(std::move(row));
  }
  return out;
}

// {"points": n} over the training range, or explicit {"levels": [[...], ...]}.
struct GridConfig {
  int points = 50;
  std::vector<std::vector<double>> levels;

  opt::SpendGrid Build(const mmm::FittedModel& m) const {
    opt::SpendGrid g = levels.empty() ? opt::SpendGrid::TrainingRange(m, points) : opt::SpendGrid::Explicit(levels);
    if (g.levels.size() != m.num_channels())
      throw SchemaError("config.grid.levels: expected one level list per channel (" +
                        std::to_string(m.num_channels()) + ")");
    g.Validate();
    return g;
  }
  Json ToJson() const {
    if (!levels.empty()) return Json{{"levels", levels}};
    return Json{{"points", points}};
  }
};

GridConfig ReadGrid(ObjectReader r) {
  GridConfig g;
  if (r.Has("levels")) {
    g.levels = NestedNumbers(r.Raw("levels"), r.PathOf("levels"));
  } else {
    g.points = r.Int("points", g.points);
    if (g.points < 2) throw SchemaError(r.PathOf("points") + ": must be at least 2");
  }
  r.Finish();
  return g;
}

opt::Window ReadWindow(ObjectReader r) {
  opt::Window w;
  w.first = r.Int("first", 0);
  w.last = r.Int("last", 0);
  r.Finish();
  if (w.last < w.first) throw SchemaError(r.path() + ": last must not precede first");
  return w;
}

Json WindowJson(const opt::Window& w) { return Json{{"first", w.first}, {"last", w.last}}; }

std::vector<std::string> SpendHeader(const mmm::FittedModel& m, const std::string& prefix) {
  std::vector<std::string> h;
  for (const auto& c : m.data.channels) h.push_back(prefix + c.name);
  return h;
}

Json OptimumJson(const opt::OptimumResult& r) {
  return Json{{"spend", r.spend}, {"revenue", r.revenue}, {"profit", r.profit}, {"periods", r.periods}};
}

}  // namespace

void RunFit(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  const std::uint64_t seed = ctx.Seed(r, "seed", 1);
  mmm::ModelSpec spec = io::ModelSpecFromJson(r.Child("model"));
  const DataOptions data_opts = ReadDataOptions(r.Child("data"));
  ObjectReader cr = r.Child("components");
  mmm::ComponentGrid grid;
  grid.default_points = cr.Int("points", grid.default_points);
  grid.rebase = cr.Bool("rebase", grid.rebase);
  cr.Finish();
  r.Finish();
  if (grid.default_points < 2) throw SchemaError("config.components.points: must be at least 2");
  ctx.SetConfig(Json{{"seed", seed},
                     {"model", io::ToJson(spec)},
                     {"data", ToJson(data_opts)},
                     {"components", Json{{"points", grid.default_points}, {"rebase", grid.rebase}}}});

  std::vector<io::SparseChannel> sparse;
  io::DatasetInfo info;
  Dataset data;
  ctx.Stage("load", [&] { data = LoadData(ctx, data_opts, &sparse, &info); });
  AddSparseDummies(spec, sparse);
  mmm::FittedModel m;
  ctx.Stage("fit", [&] { m = mmm::Fit(data, spec, seed); });
  ctx.WriteJson("model.json", io::ModelToJson(m));

  std::vector<mmm::ComponentCurve> curves;
  ctx.Stage("components", [&] { curves = mmm::Components(m, grid); });
  io::CsvTable comp = Table({"component", "kind", "x", "mean", "mean_lower", "mean_upper"});
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      comp.rows.push_back({c.name, c.kind, Num(c.grid[i]), Num(c.mean[i]), Num(c.lower[i]), Num(c.upper[i])});
  ctx.WriteCsv("components.csv", comp);

  const mmm::Prediction fitted = mmm::Fitted(m);
  io::CsvTable fit_table = Table({"t", "y", "fitted", "fitted_lower", "fitted_upper"});
  double sse = 0.0;
  for (std::size_t i = 0; i < m.periods.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double sd = std::sqrt(std::max(0.0, fitted.noisy_variance(ii)));
    double lo = fitted.mean(ii) - 1.96 * sd, hi = fitted.mean(ii) + 1.96 * sd;
    if (m.spec.log_outcome) {
      lo = std::exp(lo);
      hi = std::exp(hi);
    }
    sse += (m.outcome[i] - fitted.outcome(ii)) * (m.outcome[i] - fitted.outcome(ii));
    fit_table.rows.push_back(
        {std::to_string(m.periods[i]), Num(m.outcome[i]), Num(fitted.outcome(ii)), Num(lo), Num(hi)});
  }
  ctx.WriteCsv("fitted.csv", fit_table);

  Json hyper_means = Json::object();
  if (!m.hypers.draws.empty())
    for (std::size_t p = 0; p < m.param_names.size(); ++p) {
      double s = 0.0;
      for (const auto& d : m.hypers.draws) s += d[p];
      hyper_means[m.param_names[p]] = s / static_cast<double>(m.hypers.draws.size());
    }
  Json report{{"schema_version", io::kSchemaVersion},
              {"document", "gpmmm.fit_report"},
              {"model", mmm::ToString(m.spec.kind)},
              {"periods", info.periods},
              {"usable_periods", m.periods.size()},
              {"channels", info.channels},
              {"dummies", m.spec.dummies},
              {"sparse_converted", SparseJson(sparse)},
              {"draws", m.hypers.draws.size()},
              {"acceptance_rate", m.hypers.acceptance_rate},
              {"hyperparameter_means", hyper_means},
              {"training_rmse", std::sqrt(sse / static_cast<double>(m.periods.size()))},
              {"training_r2", NullableNumber(mmm::TrainingR2(m))},
              {"notes", m.notes}};
  if (m.hill)
    report["hill"] = Json{{"amplitude", m.hill->amplitude}, {"k", m.hill->k}, {"s", m.hill->s},
                          {"sigma", m.hill->sigma}, {"rss", m.hill->rss}};
  ctx.WriteJson("fit_report.json", report);
}

void RunEvaluate(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  const std::uint64_t seed = ctx.Seed(r, "seed", 1);
  const int horizon = r.Int("horizon", 10);
  mmm::ModelSpec truth = r.Has("true_model") ? io::ModelSpecFromJson(r.Child("true_model")) : mmm::NonlinearSpec();
  mmm::ModelSpec competing =
      r.Has("competing_model") ? io::ModelSpecFromJson(r.Child("competing_model")) : mmm::TimeVaryingSpec();
  const std::string mode = r.String("mode", "point");
  if (mode != "point" && mode != "interval") throw SchemaError(r.PathOf("mode") + ": expected point or interval");
  const double delta = r.Number("delta", 0.0);
  const int draws = mode == "interval" ? r.Int("posterior_draws", 200) : 0;
  const DataOptions data_opts = ReadDataOptions(r.Child("data"));
  r.Finish();
  if (horizon < 1) throw SchemaError("config.horizon: must be at least 1");
  Json resolved{{"seed", seed},
                {"horizon", horizon},
                {"true_model", io::ToJson(truth)},
                {"competing_model", io::ToJson(competing)},
                {"mode", mode},
                {"delta", delta}};
  if (mode == "interval") resolved["posterior_draws"] = draws;
  resolved["data"] = ToJson(data_opts);
  ctx.SetConfig(resolved);

  std::vector<io::SparseChannel> sparse;
  io::DatasetInfo info;
  Dataset data;
  ctx.Stage("load", [&] { data = LoadData(ctx, data_opts, &sparse, &info); });
  AddSparseDummies(truth, sparse);
  AddSparseDummies(competing, sparse);
  if (static_cast<int>(data.size()) <= horizon + 2)
    throw SchemaError(ctx.Argument("data") + ": too few periods for a holdout of " + std::to_string(horizon));

  eval::HoldoutResult a, b;
  ctx.Stage("true_model", [&] {
    a = eval::HoldoutEval(data, truth, horizon, gpmmm::DeriveSeed(seed, {1}), "true", draws);
  });
  ctx.Stage("competing_model", [&] {
    b = eval::HoldoutEval(data, competing, horizon, gpmmm::DeriveSeed(seed, {2}), "competing", draws);
  });
  const bool valid = a.valid && b.valid;
  bool conflated = false;
  if (valid)
    conflated = mode == "point" ? eval::ConflationLabel(a.mse, b.mse, delta) : eval::IntervalConflationLabel(a, b);

  io::CsvTable t = Table({"role", "model", "mse", "rmse", "rmse_mean", "lower", "upper", "valid", "error"});
  auto row = [&](const char* role, const eval::HoldoutResult& h, const mmm::ModelSpec& spec) {
    t.rows.push_back({role, mmm::ToString(spec.kind), Num(h.mse), Num(h.rmse), Num(h.rmse_mean), Num(h.lower),
                      Num(h.upper), h.valid ? "1" : "0", h.error});
  };
  row("true", a, truth);
  row("competing", b, competing);
  ctx.WriteCsv("holdout.csv", t);
  Json ja = HoldoutJson(a), jb = HoldoutJson(b);
  ja["model"] = mmm::ToString(truth.kind);
  jb["model"] = mmm::ToString(competing.kind);
  ctx.WriteJson("evaluation.json", Json{{"schema_version", io::kSchemaVersion},
                                        {"document", "gpmmm.evaluation"},
                                        {"horizon", horizon},
                                        {"mode", mode},
                                        {"delta", delta},
                                        {"sparse_converted", SparseJson(sparse)},
                                        {"true", ja},
                                        {"competing", jb},
                                        {"valid", valid},
                                        {"conflated", valid ? Json(conflated) : Json(nullptr)}});
}

void RunOptimize(RunContext& ctx, const Json& config) {
  ObjectReader r(config, "config");
  io::CheckSchemaVersion(r);
  const std::string mode = r.String("mode", "grid");
  const std::vector<std::string> paths = ctx.ArgumentList("model");
  std::vector<mmm::FittedModel> models;
  auto load = [&] {
    for (const auto& p : paths) models.push_back(io::LoadModel(ctx.Input(p)));
  };
  ctx.SetSeed(0);
  Json resolved{{"mode", mode}};
  Json report{{"schema_version", io::kSchemaVersion}, {"document", "gpmmm.optimization"}, {"mode", mode}};

  if (mode == "grid") {
    const double price = r.Number("price", 1.0);
    std::optional<int> period;
    if (r.Has("period") && !r.Raw("period").is_null()) period = r.Int("period", 0);
    const GridConfig grid = ReadGrid(r.Child("grid"));
    r.Finish();
    if (paths.empty()) throw SchemaError("optimize grid: at least one --model is required");
    resolved["price"] = price;
    resolved["period"] = period ? Json(*period) : Json(nullptr);
    resolved["grid"] = grid.ToJson();
    ctx.SetConfig(resolved);
    ctx.Stage("load", load);

    io::CsvTable surface = Table({"model"});
    for (const auto& h : SpendHeader(models[0], "spend_")) surface.header.push_back(h);
    for (const char* h : {"revenue", "profit", "feasible"}) surface.header.push_back(h);
    Json optima = Json::array();
    std::vector<opt::OptimumResult> results;
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (models[i].num_channels() != models[0].num_channels())
        throw SchemaError(paths[i] + ": channel count differs from " + paths[0]);
      opt::OptimumResult res;
      ctx.Stage("optimize_" + std::to_string(i), [&] {
        opt::OptimizeOptions oo;
        oo.price = price;
        oo.period = period;
        res = opt::OptimizeNoCarryover(models[i], grid.Build(models[i]), oo);
      });
      for (const auto& p : res.surface) {
        std::vector<std::string> row{std::to_string(i)};
        for (double s : p.spend) row.push_back(Num(s));
        row.push_back(Num(p.revenue));
        row.push_back(Num(p.profit));
        row.push_back(p.feasible ? "1" : "0");
        surface.rows.push_back(std::move(row));
      }
      Json o = OptimumJson(res);
      o["model"] = paths[i];
      o["kind"] = mmm::ToString(models[i].spec.kind);
      optima.push_back(o);
      results.push_back(std::move(res));
    }
    report["optima"] = optima;
    if (results.size() >= 2) {
      Json div = Json::array();
      for (std::size_t j = 0; j < models[0].num_channels(); ++j) {
        const auto& v = models[0].data.channels[j].values;
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double gap = std::abs(results[0].spend[j] - results[1].spend[j]);
        div.push_back(Json{{"channel", models[0].data.channels[j].name},
                           {"absolute", gap},
                           {"training_range", *hi - *lo},
                           {"relative_to_range", *hi > *lo ? Json(gap / (*hi - *lo)) : Json(nullptr)}});
      }
      report["divergence"] = div;
    }
    ctx.WriteCsv("surface.csv", surface);
  } else if (mode == "loglog") {
    const bool from_model = !paths.empty();
    double alpha = 0.0, beta = 0.0;
    std::optional<int> period;
    mmm::BetaExtrapolation extrap = mmm::BetaExtrapolation::kGp;
    if (from_model) {
      if (r.Has("period") && !r.Raw("period").is_null()) period = r.Int("period", 0);
      const std::string e = r.String("extrapolation", "gp");
      if (e != "gp" && e != "frozen") throw SchemaError(r.PathOf("extrapolation") + ": expected gp or frozen");
      extrap = e == "gp" ? mmm::BetaExtrapolation::kGp : mmm::BetaExtrapolation::kFrozen;
      r.Finish();
      resolved["period"] = period ? Json(*period) : Json(nullptr);
      resolved["extrapolation"] = e;
      ctx.SetConfig(resolved);
      ctx.Stage("load", load);
      if (models.size() != 1) throw SchemaError("optimize loglog: expects exactly one --model");
      const int at = period.value_or(models[0].last_period() + 1);
      alpha = mmm::LogLinearIntercept(models[0], at, extrap);
      beta = mmm::ElasticityAt(models[0], at, 0, extrap).mean;
      report["period"] = at;
    } else {
      alpha = r.Number("alpha", 0.0);
      beta = r.Number("beta", 0.5);
      r.Finish();
      resolved["alpha"] = alpha;
      resolved["beta"] = beta;
      ctx.SetConfig(resolved);
    }
    opt::LogLogOptimum o;
    ctx.Stage("closed_form", [&] {
      o = from_model ? opt::OptimizeLogLog(models[0], period.value_or(models[0].last_period() + 1), extrap)
                     : opt::ClosedFormLogLog(alpha, beta);
    });
    report["alpha"] = alpha;
    report["beta"] = beta;
    report["spend"] = o.spend;
    report["zero_boundary"] = o.zero_boundary;
    const double top = std::max(2.0 * o.spend, 1.0);
    io::CsvTable surface = Table({"spend", "revenue", "profit"});
    for (int i = 0; i <= 200; ++i) {
      const double x = top * i / 200.0;
      const double rev = x > 0.0 ? std::exp(alpha) * std::pow(x, beta) : 0.0;
      surface.rows.push_back({Num(x), Num(rev), Num(rev - x)});
    }
    ctx.WriteCsv("surface.csv", surface);
  } else if (mode == "carryover") {
    const double price = r.Number("price", 1.0);
    const opt::Window window = ReadWindow(r.Child("window"));
    const GridConfig grid = ReadGrid(r.Child("grid"));
    r.Finish();
    resolved["price"] = price;
    resolved["window"] = WindowJson(window);
    resolved["grid"] = grid.ToJson();
    ctx.SetConfig(resolved);
    ctx.Stage("load", load);
    if (models.size() != 1) throw SchemaError("optimize carryover: expects exactly one --model");
    opt::OptimumResult res;
    ctx.Stage("optimize", [&] { res = opt::OptimizeWithCarryover(models[0], window, grid.Build(models[0]), price); });
    report["optimum"] = OptimumJson(res);
    io::CsvTable surface = Table(SpendHeader(models[0], "spend_"));
    for (const char* h : {"revenue", "profit", "feasible"}) surface.header.push_back(h);
    for (const auto& p : res.surface) {
      std::vector<std::string> row;
      for (double s : p.spend) row.push_back(Num(s));
      row.push_back(Num(p.revenue));
      row.push_back(Num(p.profit));
      row.push_back(p.feasible ? "1" : "0");
      surface.rows.push_back(std::move(row));
    }
    ctx.WriteCsv("surface.csv", surface);
  } else if (mode == "allocation") {
    const double total = r.Number("total", 0.0);
    const double step = r.Number("step", 0.05);
    std::vector<std::pair<double, double>> ranges;
    if (r.Has("ranges"))
      for (const auto& rg : NestedNumbers(r.Raw("ranges"), r.PathOf("ranges"))) {
        if (rg.size() != 2) throw SchemaError(r.PathOf("ranges") + ": each range is [lo, hi]");
        ranges.emplace_back(rg[0], rg[1]);
      }
    const opt::Window window = ReadWindow(r.Child("window"));
    r.Finish();
    if (!(total > 0.0)) throw SchemaError("config.total: must be positive");
    resolved["total"] = total;
    resolved["step"] = step;
    Json rj = Json::array();
    for (const auto& [lo, hi] : ranges) rj.push_back(Json::array({lo, hi}));
    resolved["ranges"] = rj;
    resolved["window"] = WindowJson(window);
    ctx.SetConfig(resolved);
    ctx.Stage("load", load);
    if (models.size() != 2) throw SchemaError("optimize allocation: expects exactly two --model");
    if (models[0].num_channels() != models[1].num_channels())
      throw SchemaError("optimize allocation: the models have different channel counts");
    const int channels = static_cast<int>(models[0].num_channels());
    opt::AllocationSet set;
    ctx.Stage("enumerate", [&] { set = opt::EnumerateAllocations(total, channels, step, ranges); });
    if (set.empty) throw gpmmm::InfeasibleError("no allocation satisfies the spend ranges");
    opt::ConflationCost cost;
    std::vector<double> rev_a, rev_b;
    ctx.Stage("conflation_cost", [&] {
      cost = opt::ComputeConflationCost(models[0], models[1], set.allocations, window);
      std::vector<std::vector<double>> cands;
      for (const auto& a : set.allocations) cands.push_back(a.spend);
      rev_a = opt::WindowRevenue(models[0], window, cands);
      rev_b = opt::WindowRevenue(models[1], window, cands);
    });
    report["allocations"] = set.allocations.size();
    report["unfiltered"] = set.unfiltered;
    report["best_a"] = Json{{"index", cost.best_a}, {"spend", set.allocations[cost.best_a].spend}};
    report["best_b"] = Json{{"index", cost.best_b}, {"spend", set.allocations[cost.best_b].spend}};
    report["revenue_a_at_a"] = cost.revenue_a_at_a;
    report["revenue_a_at_b"] = cost.revenue_a_at_b;
    report["revenue_b_at_b"] = cost.revenue_b_at_b;
    report["revenue_b_at_a"] = cost.revenue_b_at_a;
    report["cost_if_a_true"] = cost.cost_if_a_true;
    report["cost_if_b_true"] = cost.cost_if_b_true;
    io::CsvTable surface = Table({"allocation"});
    for (const auto& h : SpendHeader(models[0], "share_")) surface.header.push_back(h);
    for (const auto& h : SpendHeader(models[0], "spend_")) surface.header.push_back(h);
    surface.header.push_back("revenue_a");
    surface.header.push_back("revenue_b");
    for (std::size_t i = 0; i < set.allocations.size(); ++i) {
      const auto& a = set.allocations[i];
      std::vector<std::string> row{std::to_string(i)};
      for (double s : a.shares) row.push_back(Num(s));
      for (double s : a.spend) row.push_back(Num(s));
      row.push_back(Num(rev_a[i]));
      row.push_back(Num(rev_b[i]));
      surface.rows.push_back(std::move(row));
    }
    ctx.WriteCsv("surface.csv", surface);
  } else {
    throw SchemaError(r.PathOf("mode") + ": expected grid, loglog, carryover or allocation");
  }
  Json models_json = Json::array();
  for (const auto& p : paths) models_json.push_back(p);
  report["models"] = models_json;
  ctx.WriteJson("report.json", report);
}

}  // namespace mmmgp
