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

#include "gpmmm/separation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "gpmmm/error.hpp"
#include "gpmmm/random.hpp"

namespace gpmmm::sep {
namespace {

double Quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  return i + 1 < v.size() ? v[i] * (1 - frac) + v[i + 1] * frac : v[i];
}

double Rmse(const Eigen::VectorXd& pred, const std::vector<double>& y, bool exp_pred) {
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = exp_pred ? std::exp(pred[static_cast<Eigen::Index>(i)]) : pred[static_cast<Eigen::Index>(i)];
    ss += (p - y[i]) * (p - y[i]);
  }
  return std::sqrt(ss / static_cast<double>(y.size()));
}

double PredictOne(const mmm::FittedModel& m, int period, double spend) {
  const mmm::Prediction p = mmm::PredictAtStock(m, {period}, {{spend}});
  return p.outcome[0];
}

Rule Resolve(Rule rule, const mmm::InferenceSpec& inference) {
  if (rule != Rule::kAuto) return rule;
  return inference.mode == mmm::InferenceMode::kMetropolis ? Rule::kInterval : Rule::kRatio;
}

void Append(Dataset& d, double spend, double y) {
  d.periods.push_back(d.periods.back() + 1);
  d.outcome.push_back(y);
  d.channels[0].values.push_back(spend);
}

}  // namespace

const char* ToString(Policy p) { return p == Policy::kMaximal ? "maximal" : "seesaw"; }

Policy PolicyFromString(const std::string& s) {
  if (s == "maximal") return Policy::kMaximal;
  if (s == "seesaw") return Policy::kSeesaw;
  throw DomainError("unknown separation policy '" + s + "'");
}

const char* ToString(Rule r) {
  switch (r) {
    case Rule::kAuto: return "auto";
    case Rule::kInterval: return "interval";
    case Rule::kRatio: return "ratio";
  }
  return "?";
}

Rule RuleFromString(const std::string& s) {
  if (s == "auto") return Rule::kAuto;
  if (s == "interval") return Rule::kInterval;
  if (s == "ratio") return Rule::kRatio;
  throw DomainError("unknown separation rule '" + s + "'");
}

void SeparationConfig::Validate() const {
  if (!candidates.empty()) {
    if (candidates.size() < 2) throw DomainError("separation needs at least two candidate levels");
    if (!std::is_sorted(candidates.begin(), candidates.end()))
      throw DomainError("candidate levels must be sorted");
    for (double c : candidates)
      if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("candidate levels must be finite and nonnegative");
  }
  if (test_periods < 0) throw DomainError("test periods must be nonnegative");
  if (Resolve(rule, inference) == Rule::kRatio && !(ratio > 1.0))
    throw DomainError("RMSE ratio threshold must exceed 1");
}

Environment LogEnvironment(std::uint64_t seed, const LogEnvConfig& c) {
  if (!(c.spending.clamp_floor > 0.0)) throw DomainError("log environment needs a positive spend floor");
  sim::SpendingSpec sp = c.spending;
  sp.periods = c.periods;
  const sim::SpendingPath path = sim::GenSpending(sp, DeriveSeed(seed, {1}));
  Rng rng = MakeRng(DeriveSeed(seed, {2}));
  std::normal_distribution<double> noise(0.0, c.noise_sd);
  Environment env;
  env.name = "log_nonlinear";
  env.noise_sd = c.noise_sd;
  env.history.channels.push_back({"spend", path.values});
  for (int t = 1; t <= c.periods; ++t) {
    env.history.periods.push_back(t);
    env.history.outcome.push_back(c.intercept + c.scale * std::log(path.values[t - 1]) + noise(rng));
  }
  env.make_response = [c]() -> Response {
    return [c](int, double x) {
      if (!(x > 0.0)) throw DomainError("log environment needs positive spend");
      return c.intercept + c.scale * std::log(x);
    };
  };
  return env;
}

sim::IntroConfig WithPeriods(int periods) {
  sim::IntroConfig c;
  c.periods = periods;
  return c;
}

Environment IntroEnvironment(std::uint64_t seed, sim::IntroConfig config) {
  const sim::SimDataset ds = sim::GenIntroExample(seed, config);
  Environment env;
  env.name = "intro_time_varying";
  env.time_varying = true;
  env.noise_sd = config.outcome_noise_sd;
  env.history = ds.ToDataset();
  env.make_response = [config]() -> Response {
    return [config](int period, double x) { return config.Beta(period) * x; };
  };
  return env;
}

Environment GpEnvironment(const sim::DgpSpec& dgp, const sim::SpendingSpec& spending, std::uint64_t seed) {
  if (dgp.carryover) throw DomainError("separation environments do not support carryover");
  if (dgp.kind == sim::DgpKind::kHill) throw DomainError("use a GP DGP for a GP environment");
  const sim::SimDataset ds = sim::GenDataset(dgp, spending, seed);
  Environment env;
  env.name = sim::ToString(dgp.kind);
  env.time_varying = dgp.kind == sim::DgpKind::kTimeVaryingGP;
  env.noise_sd = ds.sigma;
  env.history = ds.ToDataset();
  const kernels::Kernel kernel = kernels::Kernel::SE(dgp.amplitude, ds.resolved_rho);
  std::vector<double> inputs;
  if (env.time_varying) {
    for (int p : ds.periods) inputs.push_back(p);
  } else {
    inputs = ds.spend;
  }
  const std::vector<double> values = ds.effect;
  const double intercept = dgp.intercept;
  const bool tv = env.time_varying;
  const std::uint64_t path_seed = DeriveSeed(seed, {9});
  env.make_response = [=]() -> Response {
    auto path = std::make_shared<sim::GpPath>(kernel, path_seed);
    // Repeated spend levels share one value, so keep the first occurrence.
    std::vector<double> in, val;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (std::find(in.begin(), in.end(), inputs[i]) == in.end()) {
        in.push_back(inputs[i]);
        val.push_back(values[i]);
      }
    }
    path->Assign(in, val);
    return [path, intercept, tv](int period, double x) {
      return tv ? intercept + path->At(period) * x : intercept + path->At(x);
    };
  };
  return env;
}

bool SeparationTrajectory::CorrectWinner() const {
  if (!separation_period) return false;
  return winner == (truth_time_varying ? "time_varying" : "nonlinear");
}

MaximalChoice MaximalStep(const std::function<double(double)>& nl, const std::function<double(double)>& tv,
                          const std::vector<double>& candidates) {
  MaximalChoice best;
  bool have = false;
  for (double x : candidates) {
    double a = 0.0, b = 0.0;
    try {
      a = nl(x);
      b = tv(x);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "candidate " << x << " skipped: " << e.what();
      best.warnings.push_back(os.str());
      continue;
    }
    const double sep = std::abs(a - b);
    if (!std::isfinite(sep)) {
      std::ostringstream os;
      os << "candidate " << x << " skipped: non-finite prediction";
      best.warnings.push_back(os.str());
      continue;
    }
    if (!have || sep > best.separation || (sep == best.separation && x < best.spend)) {
      best.spend = x;
      best.separation = sep;
      best.predicted_nl = a;
      best.predicted_tv = b;
      have = true;
    }
  }
  if (!have) throw DomainError("every candidate spend failed to predict");
  return best;
}

MaximalChoice MaximalStep(const mmm::FittedModel& nl, const mmm::FittedModel& tv,
                          const std::vector<double>& candidates, int next_period) {
  return MaximalStep([&](double x) { return PredictOne(nl, next_period, x); },
                     [&](double x) { return PredictOne(tv, next_period, x); }, candidates);
}

double SeesawStep(int test_period, double high, double low) {
  if (test_period < 1) throw DomainError("test periods are numbered from 1");
  return test_period % 2 == 1 ? high : low;
}

std::vector<double> DefaultCandidates(const Dataset& history, int count) {
  if (history.channels.size() != 1) throw DomainError("separation tests use a single channel");
  if (count < 2) throw DomainError("need at least two candidates");
  const auto& v = history.channels[0].values;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[i] = *lo + (*hi - *lo) * i / (count - 1);
  out.back() = *hi;
  return out;
}

RmseSummary InSampleRmse(const mmm::FittedModel& model) {
  const mmm::Prediction p = mmm::Fitted(model);
  RmseSummary r;
  r.rmse = Rmse(p.outcome, model.outcome, false);
  if (p.draw_means.size() > 1) {
    std::vector<double> draws;
    for (const Eigen::VectorXd& d : p.draw_means) draws.push_back(Rmse(d, model.outcome, model.spec.log_outcome));
    r.lower = Quantile(draws, 0.025);
    r.upper = Quantile(draws, 0.975);
  } else {
    r.lower = r.upper = r.rmse;
  }
  return r;
}

bool RuleFires(Rule rule, double ratio, const RmseSummary& nl, const RmseSummary& tv) {
  switch (rule) {
    case Rule::kInterval:
      return nl.upper < tv.lower || tv.upper < nl.lower;
    case Rule::kRatio:
    case Rule::kAuto: {
      const double lo = std::min(nl.rmse, tv.rmse), hi = std::max(nl.rmse, tv.rmse);
      return lo > 0.0 ? hi / lo >= ratio : hi > 0.0;
    }
  }
  return false;
}

SeparationTrajectory RunTest(const Environment& env, const SeparationConfig& config, std::uint64_t seed) {
  config.Validate();
  if (env.history.channels.size() != 1) throw DomainError("separation tests use a single channel");
  SeparationTrajectory out;
  out.environment = env.name;
  out.policy = config.policy;
  out.rule = Resolve(config.rule, config.inference);
  out.truth_time_varying = env.time_varying;
  const std::vector<double> candidates =
      config.candidates.empty() ? DefaultCandidates(env.history) : config.candidates;

  mmm::ModelSpec nl_spec = mmm::NonlinearSpec();
  mmm::ModelSpec tv_spec = mmm::TimeVaryingSpec();
  nl_spec.inference = config.inference;
  tv_spec.inference = config.inference;

  Dataset data = env.history;
  auto fit = [&](int step, mmm::FittedModel& nl, mmm::FittedModel& tv) {
    nl = mmm::Fit(data, nl_spec, DeriveSeed(seed, {static_cast<std::uint64_t>(step), 1}));
    tv = mmm::Fit(data, tv_spec, DeriveSeed(seed, {static_cast<std::uint64_t>(step), 2}));
  };
  mmm::FittedModel nl, tv;
  fit(0, nl, tv);
  out.initial_nl = InSampleRmse(nl);
  out.initial_tv = InSampleRmse(tv);

  const Response response = env.make_response();
  Rng rng = MakeRng(DeriveSeed(seed, {1000}));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int p = 1; p <= config.test_periods; ++p) {
    TrajectoryRow row;
    row.test_period = p;
    row.period = data.periods.back() + 1;
    if (config.policy == Policy::kMaximal) {
      const MaximalChoice c = MaximalStep(nl, tv, candidates, row.period);
      row.spend = c.spend;
      for (const std::string& w : c.warnings) out.warnings.push_back("period " + std::to_string(p) + ": " + w);
    } else {
      row.spend = SeesawStep(p, candidates.back(), candidates.front());
    }
    try {
      row.predicted_nl = PredictOne(nl, row.period, row.spend);
      row.predicted_tv = PredictOne(tv, row.period, row.spend);
      row.separation = std::abs(row.predicted_nl - row.predicted_tv);
    } catch (const Error& e) {
      out.warnings.push_back("period " + std::to_string(p) + ": prediction failed: " + e.what());
    }
    row.realized = response(row.period, row.spend) + env.noise_sd * noise(rng);
    Append(data, row.spend, row.realized);
    try {
      fit(p, nl, tv);
    } catch (const Error& e) {
      out.status = "truncated at test period " + std::to_string(p) + ": " + e.what();
      break;
    }
    row.nl = InSampleRmse(nl);
    row.tv = InSampleRmse(tv);
    row.fired = RuleFires(out.rule, config.ratio, row.nl, row.tv);
    if (row.fired && !out.separation_period) {
      out.separation_period = p;
      out.winner = row.nl.rmse < row.tv.rmse ? "nonlinear" : "time_varying";
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace gpmmm::sep
