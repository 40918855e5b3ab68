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

#include "gpmmm/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "gpmmm/error.hpp"
#include "gpmmm/random.hpp"

namespace gpmmm::eval {
namespace {

constexpr int kCarryoverLags = 13;

double Quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double MeanSquaredError(const std::vector<double>& prediction, const std::vector<double>& target) {
  if (prediction.size() != target.size() || target.empty())
    throw DomainError("prediction and target lengths differ or are empty");
  double ss = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) ss += std::pow(prediction[i] - target[i], 2);
  return ss / static_cast<double>(target.size());
}

HoldoutResult HoldoutEval(const Dataset& data, const mmm::ModelSpec& spec, int horizon,
                          std::uint64_t seed, const std::string& name, int posterior_draws) {
  HoldoutResult r;
  r.model = name.empty() ? mmm::ToString(spec.kind) : name;
  if (horizon < 1 || static_cast<std::size_t>(horizon) >= data.size())
    throw DomainError("holdout length must be between 1 and the number of periods - 1");
  const std::size_t split = data.size() - static_cast<std::size_t>(horizon);
  try {
    const Dataset train = data.Slice(0, split);
    const mmm::FittedModel model = mmm::Fit(train, spec, seed);
    const std::vector<int> periods(data.periods.begin() + static_cast<std::ptrdiff_t>(split),
                                   data.periods.end());
    std::vector<std::vector<double>> spend;
    for (const Column& c : data.channels)
      spend.emplace_back(c.values.begin() + static_cast<std::ptrdiff_t>(split), c.values.end());
    mmm::PredictOptions options;
    options.latent_draws = std::max(0, posterior_draws);
    options.draw_seed = DeriveSeed(seed, {7});
    for (const std::string& d : spec.dummies) {
      for (const Column& c : data.dummies)
        if (c.name == d)
          options.dummies.emplace_back(c.values.begin() + static_cast<std::ptrdiff_t>(split), c.values.end());
    }
    const mmm::Prediction p = mmm::Predict(model, periods, spend, options);
    const std::vector<double> target(data.outcome.begin() + static_cast<std::ptrdiff_t>(split),
                                     data.outcome.end());
    r.mse = MeanSquaredError(std::vector<double>(p.outcome.data(), p.outcome.data() + p.outcome.size()),
                             target);
    r.rmse = std::sqrt(r.mse);
    for (const Eigen::VectorXd& m : posterior_draws > 0 ? p.latent_draws : p.draw_means) {
      std::vector<double> pred(m.data(), m.data() + m.size());
      if (spec.log_outcome)
        for (double& v : pred) v = std::exp(v);
      r.rmse_draws.push_back(std::sqrt(MeanSquaredError(pred, target)));
    }
    double sum = 0.0;
    for (double v : r.rmse_draws) sum += v;
    r.rmse_mean = sum / static_cast<double>(r.rmse_draws.size());
    r.lower = std::min(Quantile(r.rmse_draws, 0.025), r.rmse_mean);
    r.upper = std::max(Quantile(r.rmse_draws, 0.975), r.rmse_mean);
    r.valid = std::isfinite(r.mse);
    if (!r.valid) r.error = "non-finite holdout error";
  } catch (const Error& e) {
    r.valid = false;
    r.error = e.what();
  }
  return r;
}

HoldoutPair HoldoutEval(const Dataset& data, const mmm::ModelSpec& first,
                        const mmm::ModelSpec& second, int horizon, std::uint64_t seed) {
  return {HoldoutEval(data, first, horizon, DeriveSeed(seed, {1}), "first"),
          HoldoutEval(data, second, horizon, DeriveSeed(seed, {2}), "second")};
}

bool ConflationLabel(double true_mse, double competing_mse, double delta) {
  if (!(true_mse >= 0.0) || !(competing_mse >= 0.0) || !std::isfinite(true_mse) ||
      !std::isfinite(competing_mse))
    throw DomainError("MSEs must be finite and nonnegative");
  return competing_mse <= true_mse * (1.0 + delta);
}

bool IntervalConflationLabel(const HoldoutResult& truth, const HoldoutResult& competing) {
  return competing.lower <= truth.upper;
}

const char* ToString(Factor f) {
  switch (f) {
    case Factor::kAmplitude: return "amplitude";
    case Factor::kSmoothness: return "smoothness";
    case Factor::kHillShape: return "hill_shape";
    case Factor::kHillK: return "hill_k";
    case Factor::kArCoef: return "ar_coef";
    case Factor::kArSd: return "ar_sd";
    case Factor::kNoise: return "noise";
    case Factor::kCarryover: return "carryover";
  }
  return "?";
}

Factor FactorFromString(const std::string& s) {
  for (Factor f : kAllFactors)
    if (s == ToString(f)) return f;
  throw SchemaError("unknown simulation factor '" + s + "'");
}

const std::array<double, 3>& FactorValues(Factor f) {
  static const std::array<std::array<double, 3>, kNumFactors> table = {{
      {1.0, 2.0, 5.0},      // amplitude
      {0.1, 0.5, 1.0},      // smoothness
      {0.5, 2.0, 3.5},      // hill shape
      {0.1, 0.33, 1.0},     // hill k ratio
      {0.0, 0.5, 1.0},      // AR coefficient
      {1.0, 5.0, 10.0},     // AR sd
      {0.01, 0.1, 0.2},     // noise ratio
      {0.0, 0.3, 0.8},      // carryover decay
  }};
  return table[static_cast<std::size_t>(f)];
}

const char* LevelName(int level) {
  static const char* names[] = {"low", "medium", "high"};
  return (level >= 0 && level < 3) ? names[level] : "?";
}

std::vector<Factor> FactorsFor(sim::DgpKind kind) {
  if (kind == sim::DgpKind::kHill)
    return {Factor::kHillShape, Factor::kHillK, Factor::kArCoef, Factor::kArSd, Factor::kNoise,
            Factor::kCarryover};
  return {Factor::kAmplitude, Factor::kSmoothness, Factor::kArCoef, Factor::kArSd, Factor::kNoise,
          Factor::kCarryover};
}

double SimulationSetting::Value(Factor f) const {
  const auto i = static_cast<std::size_t>(f);
  if (value_override[i]) return *value_override[i];
  const int l = level[i];
  if (l < 0 || l > 2) throw DomainError(std::string("invalid level for factor ") + ToString(f));
  return FactorValues(f)[static_cast<std::size_t>(l)];
}

std::string SimulationSetting::Label() const {
  std::ostringstream os;
  os << sim::ToString(dgp);
  for (Factor f : FactorsFor(dgp)) os << " " << ToString(f) << "=" << Value(f);
  return os.str();
}

SimulationSetting MidSetting(sim::DgpKind kind, int id) {
  SimulationSetting s;
  s.id = id;
  s.dgp = kind;
  s.level.fill(1);
  return s;
}

std::vector<SimulationSetting> FullGrid(int replicates, int periods, int holdout) {
  std::vector<SimulationSetting> grid;
  int id = 0;
  for (sim::DgpKind kind : {sim::DgpKind::kNonlinearGP, sim::DgpKind::kTimeVaryingGP, sim::DgpKind::kHill}) {
    const std::vector<Factor> factors = FactorsFor(kind);
    for (int code = 0; code < 729; ++code) {
      SimulationSetting s = MidSetting(kind, id++);
      s.replicates = replicates;
      s.periods = periods;
      s.holdout = holdout;
      int rest = code;
      for (std::size_t k = factors.size(); k-- > 0;) {
        s.SetLevel(factors[k], rest % 3);
        rest /= 3;
      }
      grid.push_back(s);
    }
  }
  return grid;
}

sim::SpendingSpec SettingSpending(const SimulationSetting& s) {
  sim::SpendingSpec sp;
  const double level = s.spend_level.value_or(s.dgp == sim::DgpKind::kHill ? kHillSpendLevel : 0.0);
  const double gamma = s.Value(Factor::kArCoef);
  sp.drift = level * (1.0 - gamma);
  sp.ar_coef = gamma;
  sp.sd = s.Value(Factor::kArSd);
  sp.initial = level;
  sp.periods = s.periods;
  sp.clamp_floor = s.dgp == sim::DgpKind::kHill || level > 0.0 ? 0.0 : sim::SpendingSpec::kNoClamp;
  return sp;
}

sim::DgpSpec SettingDgp(const SimulationSetting& s) {
  sim::DgpSpec d;
  d.kind = s.dgp;
  d.amplitude = s.Value(Factor::kAmplitude);
  d.smoothness = s.Value(Factor::kSmoothness);
  d.hill_shape = s.Value(Factor::kHillShape);
  d.hill_k_ratio = s.Value(Factor::kHillK);
  d.noise_ratio = s.Value(Factor::kNoise);
  const double decay = s.Value(Factor::kCarryover);
  if (decay > 0.0) d.carryover = transforms::StockSpec{decay, kCarryoverLags};
  d.intercept = 0.0;
  return d;
}

mmm::ModelSpec TrueModelFor(sim::DgpKind kind) {
  return kind == sim::DgpKind::kTimeVaryingGP ? mmm::TimeVaryingSpec() : mmm::NonlinearSpec();
}

mmm::ModelSpec CompetingModelFor(sim::DgpKind kind) {
  return kind == sim::DgpKind::kTimeVaryingGP ? mmm::NonlinearSpec() : mmm::TimeVaryingSpec();
}

ConflationRecord RunReplicate(const SimulationSetting& s, int replicate, const MegasimOptions& options) {
  ConflationRecord rec;
  rec.setting_id = s.id;
  rec.replicate = replicate;
  rec.seed = DeriveSeed(options.master_seed,
                        {static_cast<std::uint64_t>(s.id), static_cast<std::uint64_t>(replicate)});
  try {
    const sim::SimDataset sim = sim::GenDataset(SettingDgp(s), SettingSpending(s), rec.seed);
    const Dataset data = sim.ToDataset();
    mmm::ModelSpec truth_spec = TrueModelFor(s.dgp);
    mmm::ModelSpec comp_spec = CompetingModelFor(s.dgp);
    truth_spec.inference = options.inference;
    comp_spec.inference = options.inference;
    const int draws = options.mode == LabelMode::kInterval ? options.posterior_draws : 0;
    const HoldoutResult truth =
        HoldoutEval(data, truth_spec, s.holdout, DeriveSeed(rec.seed, {11}), "true", draws);
    const HoldoutResult comp =
        HoldoutEval(data, comp_spec, s.holdout, DeriveSeed(rec.seed, {12}), "competing", draws);
    rec.true_mse = truth.mse;
    rec.competing_mse = comp.mse;
    rec.true_lower = truth.lower;
    rec.true_upper = truth.upper;
    rec.competing_lower = comp.lower;
    rec.competing_upper = comp.upper;
    rec.valid = truth.valid && comp.valid;
    if (!truth.valid) rec.error = "true model: " + truth.error;
    if (!comp.valid) rec.error += (rec.error.empty() ? "" : "; ") + std::string("competing model: ") + comp.error;
    if (rec.valid)
      rec.conflated = options.mode == LabelMode::kPoint
                          ? ConflationLabel(truth.mse, comp.mse, options.delta)
                          : IntervalConflationLabel(truth, comp);
  } catch (const Error& e) {
    rec.valid = false;
    rec.error = e.what();
  }
  return rec;
}

std::vector<SettingRate> AggregateRates(const std::vector<SimulationSetting>& grid,
                                        const std::vector<ConflationRecord>& records) {
  std::vector<SettingRate> rates;
  for (const SimulationSetting& s : grid) {
    SettingRate r;
    r.setting_id = s.id;
    std::string first_error;
    for (const ConflationRecord& rec : records) {
      if (rec.setting_id != s.id) continue;
      if (!rec.valid) {
        ++r.invalid;
        if (first_error.empty()) first_error = rec.error;
        continue;
      }
      ++r.valid;
      if (rec.conflated) ++r.conflated;
    }
    if (r.valid > 0) r.rate = static_cast<double>(r.conflated) / r.valid;
    if (r.invalid > 0)
      r.diagnostics = std::to_string(r.invalid) + " invalid replicates; first: " + first_error;
    rates.push_back(r);
  }
  return rates;
}

MegasimResult Megasim(const std::vector<SimulationSetting>& grid, const MegasimOptions& options) {
  if (grid.empty()) throw DomainError("empty simulation grid");
  struct Task {
    std::size_t setting;
    int replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int r = 0; r < grid[i].replicates; ++r) tasks.push_back({i, r});

  MegasimResult result;
  result.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size() && !failed; i = next++) {
      try {
        result.records[i] = RunReplicate(grid[tasks[i].setting], tasks[i].replicate, options);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  unsigned workers = options.workers > 0 ? static_cast<unsigned>(options.workers)
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.rates = AggregateRates(grid, result.records);
  return result;
}

std::vector<AnyMajor> SummarizeAnyMajor(const std::vector<SimulationSetting>& grid,
                                        const std::vector<SettingRate>& rates) {
  std::vector<AnyMajor> out;
  for (sim::DgpKind kind : {sim::DgpKind::kNonlinearGP, sim::DgpKind::kTimeVaryingGP, sim::DgpKind::kHill}) {
    AnyMajor a{kind};
    int any = 0, major = 0;
    for (std::size_t i = 0; i < grid.size() && i < rates.size(); ++i) {
      if (grid[i].dgp != kind || !rates[i].rate) continue;
      ++a.settings;
      if (*rates[i].rate > 0.0) ++any;
      if (*rates[i].rate > 0.25) ++major;
    }
    if (a.settings == 0) continue;
    a.any = static_cast<double>(any) / a.settings;
    a.major = static_cast<double>(major) / a.settings;
    out.push_back(a);
  }
  return out;
}

double StudentTwoSidedP(double t, double df) {
  if (!(df > 0.0)) return kNaN;
  if (std::isnan(t)) return kNaN;
  if (std::isinf(t)) return 0.0;
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

OlsTable Ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names) {
  if (x.rows() != y.size()) throw DomainError("design rows do not match the response");
  if (static_cast<std::size_t>(x.cols()) != names.size()) throw DomainError("one name per design column");
  OlsTable table;
  table.observations = static_cast<int>(y.size());

  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd kept_cols(x.rows(), 0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd col = x.col(j);
    const double norm = col.norm();
    if (norm == 0.0) {
      table.dropped.push_back(names[static_cast<std::size_t>(j)]);
      table.warnings.push_back("column '" + names[static_cast<std::size_t>(j)] + "' is all zero; dropped");
      continue;
    }
    if (kept_cols.cols() > 0) {
      const Eigen::VectorXd coef = kept_cols.colPivHouseholderQr().solve(col);
      if ((col - kept_cols * coef).norm() <= 1e-10 * norm) {
        table.dropped.push_back(names[static_cast<std::size_t>(j)]);
        table.warnings.push_back("column '" + names[static_cast<std::size_t>(j)] +
                                 "' is aliased with earlier columns; dropped");
        continue;
      }
    }
    kept.push_back(j);
    kept_cols.conservativeResize(Eigen::NoChange, kept_cols.cols() + 1);
    kept_cols.col(kept_cols.cols() - 1) = col;
  }
  const auto p = kept_cols.cols();
  const Eigen::VectorXd beta = p > 0 ? Eigen::VectorXd(kept_cols.colPivHouseholderQr().solve(y))
                                     : Eigen::VectorXd(0);
  table.residuals = p > 0 ? Eigen::VectorXd(y - kept_cols * beta) : y;
  table.df = static_cast<int>(y.size() - p);
  const double rss = table.residuals.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  table.r2 = tss > 0.0 ? 1.0 - rss / tss : kNaN;
  Eigen::MatrixXd inv;
  if (p > 0) inv = (kept_cols.transpose() * kept_cols).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const double s2 = table.df > 0 ? rss / table.df : kNaN;
  for (Eigen::Index k = 0; k < p; ++k) {
    CoefficientRow row;
    row.name = names[static_cast<std::size_t>(kept[static_cast<std::size_t>(k)])];
    row.estimate = beta[k];
    row.std_error = std::sqrt(s2 * inv(k, k));
    if (table.df > 0) {
      row.t = row.std_error > 0.0 ? row.estimate / row.std_error
                                  : (row.estimate == 0.0 ? kNaN : std::copysign(INFINITY, row.estimate));
      row.p = StudentTwoSidedP(row.t, table.df);
    }
    table.rows.push_back(row);
  }
  return table;
}

OlsTable RateRegression(const std::vector<SimulationSetting>& grid,
                        const std::vector<SettingRate>& rates, sim::DgpKind dgp) {
  const std::vector<Factor> factors = FactorsFor(dgp);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < grid.size() && i < rates.size(); ++i)
    if (grid[i].dgp == dgp && rates[i].rate) rows.push_back(i);
  if (rows.empty()) throw DomainError("no settings with a conflation rate for this DGP");

  std::vector<std::string> names = {"intercept"};
  for (Factor f : factors)
    for (int l = 1; l <= 2; ++l) names.push_back(std::string(ToString(f)) + ":" + LevelName(l));
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(names.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const SimulationSetting& s = grid[rows[r]];
    x(ri, 0) = 1.0;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      const int l = s.Level(factors[k]);
      if (l >= 1) x(ri, static_cast<Eigen::Index>(1 + 2 * k + static_cast<std::size_t>(l - 1))) = 1.0;
    }
    y[ri] = 100.0 * *rates[rows[r]].rate;
  }
  OlsTable table = Ols(x, y, names);
  for (Factor f : factors) {
    for (int l = 0; l < 3; ++l) {
      int count = 0;
      for (std::size_t r : rows) count += grid[r].Level(f) == l;
      if (count > 0 && count < 2)
        table.warnings.push_back(std::string("factor ") + ToString(f) + " level " + LevelName(l) +
                                 " has fewer than 2 settings");
    }
  }
  return table;
}

}  // namespace gpmmm::eval
