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

#include "gpmmm/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <thread>

#include "gpmmm/dataset.hpp"
#include "gpmmm/error.hpp"
#include "gpmmm/evaluation.hpp"
#include "gpmmm/mmm_models.hpp"
#include "gpmmm/random.hpp"

namespace gpmmm::theory {
namespace {

// OLS on rows [first, last]; shared by Ols and PiecewiseOls so that a single
// full block matches Ols bit for bit.
OlsFit FitRange(const std::vector<double>& x, const std::vector<double>& y, int first, int last) {
  const int n = last - first + 1;
  double xbar = 0.0, ybar = 0.0;
  for (int i = first; i <= last; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = first; i <= last; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw DomainError("zero variance in x");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ssr = 0.0;
  for (int i = first; i <= last; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.residuals.push_back(r);
    ssr += r * r;
  }
  if (n > 2) fit.slope_se = std::sqrt(ssr / (n - 2) / sxx);
  return fit;
}

void CheckLengths(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("x and y lengths differ");
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s / static_cast<double>(v.size());
}

// Sample mean and its standard error.
MeanCheck Summarize(const std::vector<double>& v) {
  MeanCheck m;
  m.draws = static_cast<int>(v.size());
  m.mean = Mean(v);
  double ss = 0.0;
  for (double a : v) ss += (a - m.mean) * (a - m.mean);
  m.se = std::sqrt(ss / (v.size() - 1) / v.size());
  return m;
}

// Linear interpolation through increasing knots; knots return their value.
double Interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return ys.back();
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (*it == x || i == 0) return ys[i];
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

Check Within(const std::string& name, double value, double target, double tolerance) {
  return {name, std::abs(value - target) <= tolerance, value, target, tolerance};
}

}  // namespace

OlsFit Ols(const std::vector<double>& x, const std::vector<double>& y) {
  CheckLengths(x, y);
  if (x.size() < 3) throw DomainError("OLS needs at least three points");
  return FitRange(x, y, 0, static_cast<int>(x.size()) - 1);
}

TaylorDecomposition TaylorDecompose(const Fn& f, const Fn& df, const Fn& d2f, const std::vector<double>& x,
                                    const std::vector<double>& noise) {
  CheckLengths(x, noise);
  const double xbar = Mean(x);
  double m2 = 0.0, m3 = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - xbar;
    m2 += d * d;
    m3 += d * d * d;
    cross += d * noise[i];
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  cross /= n;

  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]) + noise[i];

  TaylorDecomposition out;
  out.ols_slope = Ols(x, y).slope;
  out.term1 = df(xbar);
  out.term3 = cross / m2;

  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  double lo = d2f(*lo_it), hi = lo;
  auto visit = [&](double z) {
    const double c = d2f(z);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  };
  for (double z : x) visit(z);
  for (int k = 0; k <= 64; ++k) visit(*lo_it + (*hi_it - *lo_it) * k / 64.0);
  out.curvature_lo = lo;
  out.curvature_hi = hi;
  out.constant_curvature = hi - lo <= 1e-12 * std::max(1.0, std::abs(hi));

  out.term2 = out.constant_curvature ? 0.5 * lo * m3 / m2 : out.ols_slope - out.term1 - out.term3;
  out.reconstruction = out.term1 + out.term2 + out.term3;
  if (std::abs(m3) > 1e-14 * std::pow(m2, 1.5)) out.implied_curvature = 2.0 * out.term2 * m2 / m3;

  constexpr double h = 1e-5;
  double worst = 0.0;
  for (double z : x) {
    worst = std::max(worst, std::abs(df(z) - (f(z + h) - f(z - h)) / (2 * h)));
    worst = std::max(worst, std::abs(d2f(z) - (df(z + h) - df(z - h)) / (2 * h)));
  }
  out.derivative_check = worst;
  return out;
}

std::vector<PiecewiseBlock> PiecewiseOls(const std::vector<double>& x, const std::vector<double>& y, int tau) {
  CheckLengths(x, y);
  if (tau < 2) throw DomainError("piecewise OLS needs tau >= 2; use RatioEstimator for tau = 1");
  const int n = static_cast<int>(x.size());
  if (n < tau) throw DomainError("fewer points than the window size");
  std::vector<PiecewiseBlock> blocks;
  for (int first = 0; first < n; first += tau) {
    PiecewiseBlock b;
    b.first = first;
    b.last = std::min(first + tau, n) - 1;
    blocks.push_back(b);
  }
  if (blocks.size() > 1 && blocks.back().last == blocks.back().first) {
    blocks.pop_back();
    blocks.back().last = n - 1;
  }
  for (PiecewiseBlock& b : blocks) {
    try {
      b.fit = FitRange(x, y, b.first, b.last);
      b.fitted = true;
    } catch (const DomainError& e) {
      b.error = e.what();
    }
  }
  return blocks;
}

std::vector<std::optional<double>> RatioEstimator(const std::vector<double>& x, const std::vector<double>& y) {
  CheckLengths(x, y);
  std::vector<std::optional<double>> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) >= 1e-12) out[i] = y[i] / x[i];
  return out;
}

RwMoments RandomWalkMoments(int periods, double tau, double x0, int seeds, std::uint64_t master_seed,
                            int workers) {
  if (periods < 1) throw DomainError("random walk needs at least one period");
  if (seeds < 100) throw DomainError("random walk moments need at least 100 seeds");
  if (!(tau >= 0.0)) throw DomainError("random walk sd must be nonnegative");
  std::vector<double> last(static_cast<std::size_t>(seeds)), avg(static_cast<std::size_t>(seeds));
  auto run = [&](int begin, int end) {
    for (int s = begin; s < end; ++s) {
      Rng rng = MakeRng(DeriveSeed(master_seed, {static_cast<std::uint64_t>(s)}));
      std::normal_distribution<double> step(0.0, tau > 0.0 ? tau : 1.0);
      double x = x0, sum = 0.0;
      for (int t = 0; t < periods; ++t) {
        if (tau > 0.0) x += step(rng);
        sum += x;
      }
      last[s] = x;
      avg[s] = sum / periods;
    }
  };
  workers = std::clamp(workers, 1, seeds);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run, seeds * w / workers, seeds * (w + 1) / workers);
  run(0, seeds / workers);
  for (std::thread& t : pool) t.join();

  RwMoments m;
  m.periods = periods;
  m.tau = tau;
  m.x0 = x0;
  m.seeds = seeds;
  m.analytic_mean = x0;
  m.analytic_var = periods * tau * tau;
  const MeanCheck end = Summarize(last);
  m.mc_mean = end.mean;
  m.mc_mean_se = end.se;
  double s2 = 0.0, m4 = 0.0;
  for (double v : last) {
    const double d = v - end.mean;
    s2 += d * d;
    m4 += d * d * d * d;
  }
  m.mc_var = s2 / (seeds - 1);
  m4 /= seeds;
  m.mc_var_se = std::sqrt(std::max(0.0, m4 - m.mc_var * m.mc_var) / seeds);
  const MeanCheck sm = Summarize(avg);
  m.mc_sample_mean = sm.mean;
  m.mc_sample_mean_se = sm.se;
  return m;
}

MeanCheck NoiseOrthogonality(int draws, std::uint64_t seed) {
  if (draws < 2) throw DomainError("need at least two draws");
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> x(5.0, 2.0), eps(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(draws));
  for (double& a : v) {
    const double xi = x(rng);
    a = xi * eps(rng);
  }
  return Summarize(v);
}

MonotoneDemoReport MonotoneConflationDemo(std::uint64_t seed, const MonotoneDemoConfig& c) {
  if (c.periods <= c.horizon + 2 || c.horizon < 1) throw DomainError("invalid monotone demo periods");
  const int n = c.periods;
  MonotoneDemoReport r;
  std::uint64_t sub = seed;
  for (int attempt = 0; attempt < c.max_attempts; ++attempt) {
    sub = attempt == 0 ? seed : DeriveSeed(seed, {static_cast<std::uint64_t>(attempt)});
    Rng rng = MakeRng(DeriveSeed(sub, {1}));
    std::normal_distribution<double> jitter(0.0, c.x_noise_sd);
    r.spend.assign(n, 0.0);
    for (int t = 1; t <= n; ++t)
      r.spend[t - 1] = std::max(0.0, c.x_start + c.x_slope * t + jitter(rng));
    r.attempts = attempt + 1;
    if (std::adjacent_find(r.spend.begin(), r.spend.end(), std::greater_equal<>()) == r.spend.end()) break;
    r.spend.clear();
  }
  if (r.spend.empty()) throw SamplerError("no strictly increasing spend path within the attempt budget");
  r.seed = sub;

  r.beta.resize(n);
  for (int t = 1; t <= n; ++t) r.beta[t - 1] = c.b0 + c.b1 * std::sin(2.0 * std::numbers::pi * t / c.cycle);

  r.reconstruction_residual = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = Interpolate(r.spend, r.beta, r.spend[i]) * r.spend[i];
    r.reconstruction_residual = std::max(r.reconstruction_residual, std::abs(f - r.beta[i] * r.spend[i]));
  }

  // Spend drawn with replacement: repeated levels carry different betas, so
  // the best static map averages them.
  Rng pick_rng = MakeRng(DeriveSeed(sub, {3}));
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<double> shuffled(n);
  for (double& v : shuffled) v = r.spend[pick(pick_rng)];
  std::map<double, std::pair<double, int>> groups;
  for (int i = 0; i < n; ++i) {
    auto& g = groups[shuffled[i]];
    g.first += r.beta[i];
    ++g.second;
  }
  r.shuffled_residual = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& g = groups[shuffled[i]];
    const double h = g.first / g.second;
    r.shuffled_residual = std::max(r.shuffled_residual, std::abs(h - r.beta[i]) * shuffled[i]);
  }
  r.noise_floor = c.noise_sd;

  Rng noise_rng = MakeRng(DeriveSeed(sub, {2}));
  std::normal_distribution<double> noise(0.0, c.noise_sd);
  Dataset d;
  for (int t = 1; t <= n; ++t) {
    d.periods.push_back(t);
    d.outcome.push_back(r.beta[t - 1] * r.spend[t - 1] + noise(noise_rng));
  }
  d.channels.push_back({"spend", r.spend});
  const eval::HoldoutResult tv = eval::HoldoutEval(d, mmm::TimeVaryingSpec(), c.horizon, DeriveSeed(sub, {4}));
  const eval::HoldoutResult nl = eval::HoldoutEval(d, mmm::NonlinearSpec(), c.horizon, DeriveSeed(sub, {5}));
  r.time_varying_mse = tv.mse;
  r.nonlinear_mse = nl.mse;
  r.conflated = tv.valid && nl.valid && eval::ConflationLabel(tv.mse, nl.mse, c.delta);
  return r;
}

std::vector<Check> RunSuite(std::uint64_t seed, int workers) {
  std::vector<Check> out;
  const Fn sq = [](double x) { return x * x; };
  const Fn dsq = [](double x) { return 2 * x; };
  const Fn d2sq = [](double) { return 2.0; };

  out.push_back(Within("ols_x_squared_slope", Ols({1, 2, 3}, {1, 4, 9}).slope, 4.0, 0.0));

  const TaylorDecomposition sym = TaylorDecompose(sq, dsq, d2sq, {1, 2, 3}, {0, 0, 0});
  out.push_back(Within("taylor_symmetric_term1", sym.term1, 4.0, 0.0));
  out.push_back(Within("taylor_symmetric_term2", sym.term2, 0.0, 0.0));

  // x = (1, 2, 4): m2 = 14/9, m3 = 20/27, so term2 = m3 / m2 = 10/21.
  const TaylorDecomposition asym = TaylorDecompose(sq, dsq, d2sq, {1, 2, 4}, {0, 0, 0});
  out.push_back(Within("taylor_asymmetric_term2", asym.term2, 10.0 / 21.0, 1e-9));
  out.push_back(Within("taylor_asymmetric_reconstruction", asym.reconstruction, asym.ols_slope, 1e-9));

  Rng rng = MakeRng(DeriveSeed(seed, {1}));
  std::uniform_real_distribution<double> ux(0.0, 10.0);
  std::normal_distribution<double> ue(0.0, 1.0);
  std::vector<double> x(50), e(50);
  for (int i = 0; i < 50; ++i) {
    x[i] = ux(rng);
    e[i] = ue(rng);
  }
  const TaylorDecomposition noisy = TaylorDecompose([](double z) { return 0.5 * z * z + z; },
                                                    [](double z) { return z + 1; }, [](double) { return 1.0; }, x, e);
  out.push_back(Within("taylor_noisy_reconstruction", noisy.reconstruction, noisy.ols_slope, 1e-9));

  std::vector<double> y(50);
  for (int i = 0; i < 50; ++i) y[i] = 3 * std::sin(x[i]) + e[i];
  const OlsFit full = Ols(x, y);
  const std::vector<PiecewiseBlock> one = PiecewiseOls(x, y, 50);
  const bool same = one.size() == 1 && one[0].fitted && one[0].fit.slope == full.slope &&
                    one[0].fit.intercept == full.intercept && one[0].fit.residuals == full.residuals;
  out.push_back({"piecewise_full_window_equals_ols", same, same ? 1.0 : 0.0, 1.0, 0.0});

  const RwMoments rw = RandomWalkMoments(100, 1.0, 5.0, 2000, DeriveSeed(seed, {2}), workers);
  out.push_back(Within("random_walk_mean", rw.mc_mean, rw.analytic_mean, 3 * rw.mc_mean_se));
  out.push_back(Within("random_walk_variance", rw.mc_var, rw.analytic_var, 3 * rw.mc_var_se));
  out.push_back(Within("random_walk_sample_mean", rw.mc_sample_mean, rw.x0, 3 * rw.mc_sample_mean_se));

  const MeanCheck orth = NoiseOrthogonality(10000, DeriveSeed(seed, {3}));
  out.push_back(Within("noise_orthogonality", orth.mean, 0.0, 3 * orth.se));
  return out;
}

}  // namespace gpmmm::theory
