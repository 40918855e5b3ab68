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

#include "gpmmm/dgp_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpmmm/error.hpp"
#include "gpmmm/gp_core.hpp"
#include "gpmmm/random.hpp"

namespace gpmmm::sim {
namespace {

enum Stream : std::uint64_t { kSpend = 1, kFunction = 2, kNoise = 3, kSpendNoise = 4 };

std::vector<double> Noise(std::size_t n, double sd, std::uint64_t seed) {
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> e(n);
  for (double& v : e) v = sd * normal(rng);
  return e;
}

// y = d + e where e ~ N(0, sigma^2), recorded in the dataset.
void AddNoise(SimDataset& ds, double sigma, std::uint64_t seed) {
  ds.sigma = sigma;
  ds.noise = Noise(ds.deterministic.size(), sigma, seed);
  ds.outcome.resize(ds.deterministic.size());
  for (std::size_t i = 0; i < ds.outcome.size(); ++i)
    ds.outcome[i] = ds.deterministic[i] + ds.noise[i];
}

}  // namespace

const char* ToString(DgpKind kind) {
  switch (kind) {
    case DgpKind::kNonlinearGP: return "nonlinear_gp";
    case DgpKind::kTimeVaryingGP: return "time_varying_gp";
    case DgpKind::kHill: return "hill";
  }
  return "?";
}

DgpKind DgpKindFromString(const std::string& s) {
  if (s == "nonlinear_gp") return DgpKind::kNonlinearGP;
  if (s == "time_varying_gp") return DgpKind::kTimeVaryingGP;
  if (s == "hill") return DgpKind::kHill;
  throw DomainError("unknown DGP kind '" + s + "'");
}

double SampleSd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

SpendingPath GenSpending(const SpendingSpec& spec, std::uint64_t seed) {
  if (spec.periods < 2) throw DomainError("spending needs at least 2 periods");
  if (spec.sd < 0.0) throw DomainError("spending sd must be nonnegative");
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal;
  SpendingPath out;
  out.values.resize(static_cast<std::size_t>(spec.periods));
  out.values[0] = spec.initial;
  for (std::size_t t = 1; t < out.values.size(); ++t) {
    double x = spec.drift + spec.ar_coef * out.values[t - 1] + spec.sd * normal(rng);
    if (x < spec.clamp_floor) {
      x = spec.clamp_floor;
      ++out.clamped;
    }
    out.values[t] = x;
  }
  return out;
}

Dataset SimDataset::ToDataset(const std::string& channel) const {
  Dataset d;
  d.periods = periods;
  d.outcome = outcome;
  d.channels.push_back({channel, spend});
  d.signed_spend = std::any_of(spend.begin(), spend.end(), [](double v) { return v < 0.0; });
  return d;
}

SimDataset GenDataset(const DgpSpec& dgp, const SpendingSpec& spending, std::uint64_t seed) {
  if (!(dgp.amplitude > 0.0) && dgp.kind != DgpKind::kHill)
    throw DomainError("GP amplitude must be positive");
  if (!(dgp.smoothness > 0.0) && dgp.kind != DgpKind::kHill)
    throw DomainError("smoothness ratio must be positive");
  if (dgp.noise_ratio < 0.0) throw DomainError("noise ratio must be nonnegative");

  SimDataset ds;
  ds.seed = seed;
  const int lags = dgp.carryover ? dgp.carryover->lags : 0;
  SpendingSpec full = spending;
  full.periods = spending.periods + lags;
  SpendingPath raw = GenSpending(full, DeriveSeed(seed, {kSpend}));
  ds.spend_raw = raw.values;
  ds.clamped = raw.clamped;
  if (raw.clamped > 0)
    ds.log.push_back("spending clamped at " + std::to_string(spending.clamp_floor) + " in " +
                     std::to_string(raw.clamped) + " periods");
  if (dgp.carryover) {
    ds.spend = transforms::Adstock(ds.spend_raw, *dgp.carryover).values;
  } else {
    ds.spend = ds.spend_raw;
  }
  const std::size_t n = ds.spend.size();
  ds.periods.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.periods[i] = static_cast<int>(i) + 1;

  const auto [lo, hi] = std::minmax_element(ds.spend.begin(), ds.spend.end());
  const double x_range = *hi - *lo;
  ds.deterministic.resize(n);
  ds.effect.resize(n);
  std::ostringstream note;

  switch (dgp.kind) {
    case DgpKind::kNonlinearGP: {
      if (!(x_range > 0.0)) throw DomainError("spend range is degenerate; cannot resolve rho");
      ds.resolved_rho = dgp.smoothness * x_range;
      note << "rho = " << dgp.smoothness << " x range(x) = " << ds.resolved_rho;
      // Draw f once per distinct spend level so repeated levels share a value.
      std::vector<double> levels = ds.spend;
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      const Eigen::VectorXd f = gp::SamplePrior(
          kernels::Kernel::SE(dgp.amplitude, ds.resolved_rho), levels, DeriveSeed(seed, {kFunction}));
      for (std::size_t i = 0; i < n; ++i) {
        const auto idx = std::lower_bound(levels.begin(), levels.end(), ds.spend[i]) - levels.begin();
        ds.effect[i] = f(idx);
        ds.deterministic[i] = dgp.intercept + ds.effect[i];
      }
      break;
    }
    case DgpKind::kTimeVaryingGP: {
      ds.resolved_rho = dgp.smoothness * static_cast<double>(n - 1);
      note << "rho = " << dgp.smoothness << " x range(t) = " << ds.resolved_rho;
      std::vector<double> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = ds.periods[i];
      const Eigen::VectorXd beta = gp::SamplePrior(
          kernels::Kernel::SE(dgp.amplitude, ds.resolved_rho), t, DeriveSeed(seed, {kFunction}));
      for (std::size_t i = 0; i < n; ++i) {
        ds.effect[i] = beta(static_cast<Eigen::Index>(i));
        ds.deterministic[i] = dgp.intercept + ds.effect[i] * ds.spend[i];
      }
      break;
    }
    case DgpKind::kHill: {
      if (!(x_range > 0.0)) throw DomainError("spend range is degenerate; cannot resolve k");
      ds.resolved_k = dgp.hill_k_ratio * x_range;
      note << "k = " << dgp.hill_k_ratio << " x range(x) = " << ds.resolved_k;
      const transforms::HillParams hp{ds.resolved_k, dgp.hill_shape};
      for (std::size_t i = 0; i < n; ++i) {
        ds.effect[i] = transforms::Hill(ds.spend[i], hp);
        ds.deterministic[i] = dgp.intercept + dgp.hill_amplitude * ds.effect[i];
      }
      break;
    }
  }
  ds.log.push_back(note.str());
  AddNoise(ds, dgp.noise_ratio * SampleSd(ds.deterministic), DeriveSeed(seed, {kNoise}));
  return ds;
}

double IntroConfig::Beta(double t) const {
  return b0 + b1 * std::sin(2.0 * std::numbers::pi * t / cycle);
}

SimDataset GenIntroExample(std::uint64_t seed, const IntroConfig& c) {
  if (c.periods < 2 || c.lag < 0 || c.cycle <= 0) throw DomainError("invalid intro config");
  SimDataset ds;
  ds.seed = seed;
  const std::size_t n = static_cast<std::size_t>(c.periods);
  const std::vector<double> spend_noise = Noise(n, c.spend_noise_sd, DeriveSeed(seed, {kSpendNoise}));
  ds.periods.resize(n);
  ds.spend.resize(n);
  ds.effect.resize(n);
  ds.deterministic.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int t = static_cast<int>(i) + 1;
    ds.periods[i] = t;
    ds.effect[i] = c.Beta(t);
    double x = c.c0 + c.c1 * c.Beta(t - c.lag) + spend_noise[i];
    if (x < c.spend_floor) {
      x = c.spend_floor;
      ++ds.clamped;
    }
    ds.spend[i] = x;
    ds.deterministic[i] = ds.effect[i] * x;
  }
  ds.spend_raw = ds.spend;
  AddNoise(ds, c.outcome_noise_sd, DeriveSeed(seed, {kNoise}));
  ds.log.push_back("intro example: cycle " + std::to_string(c.cycle) + ", lag " +
                   std::to_string(c.lag));
  return ds;
}

double SigmoidConfig::Response(double x) const {
  const double u = (std::log(x) - std::log(midpoint)) / width;
  return y_min + (y_max - y_min) / (1.0 + std::exp(-u));
}

SimDataset GenSigmoidCase(std::uint64_t seed, const SigmoidConfig& c) {
  if (!(c.midpoint > 0.0) || !(c.width > 0.0)) throw DomainError("invalid sigmoid config");
  SimDataset ds;
  ds.seed = seed;
  SpendingSpec sp = c.spending;
  sp.periods = c.periods;
  SpendingPath path = GenSpending(sp, DeriveSeed(seed, {kSpend}));
  ds.spend_raw = path.values;
  ds.spend = path.values;
  ds.clamped = path.clamped;
  const std::size_t n = ds.spend.size();
  ds.periods.resize(n);
  ds.effect.resize(n);
  ds.deterministic.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.periods[i] = static_cast<int>(i) + 1;
    ds.deterministic[i] = c.Response(ds.spend[i]);
    ds.effect[i] = ds.deterministic[i];
  }
  AddNoise(ds, c.noise_ratio * SampleSd(ds.deterministic), DeriveSeed(seed, {kNoise}));
  ds.log.push_back("sigmoid case: midpoint " + std::to_string(c.midpoint));
  return ds;
}

GpPath::GpPath(kernels::Kernel kernel, std::uint64_t seed)
    : kernel_(std::move(kernel)), seed_(seed) {}

void GpPath::Assign(std::vector<double> inputs, std::vector<double> values) {
  if (inputs.size() != values.size()) throw DomainError("GpPath inputs/values length mismatch");
  inputs_ = std::move(inputs);
  values_ = std::move(values);
}

double GpPath::At(double input) {
  for (std::size_t i = 0; i < inputs_.size(); ++i)
    if (inputs_[i] == input) return values_[i];
  Rng rng = MakeRng(DeriveSeed(seed_, {draws_++}));
  const double u = std::normal_distribution<double>()(rng);
  double mean = 0.0;
  double var = kernels::Variance(kernel_, input);
  if (!inputs_.empty()) {
    const Eigen::MatrixXd k = kernels::Gram(kernel_, inputs_);
    const kernels::Factor f = kernels::StableCholesky(k, /*allow_zero=*/false, "GP path");
    const auto l = f.lower.triangularView<Eigen::Lower>();
    const double z[1] = {input};
    const Eigen::VectorXd ks = kernels::Cross(kernel_, z, inputs_).row(0).transpose();
    const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(values_.data(), values_.size());
    const Eigen::VectorXd a = l.solve(ks);
    mean = a.dot(l.solve(fv));
    var -= a.squaredNorm();
  }
  const double v = mean + std::sqrt(std::max(var, 0.0)) * u;
  inputs_.push_back(input);
  values_.push_back(v);
  return v;
}

}  // namespace gpmmm::sim
