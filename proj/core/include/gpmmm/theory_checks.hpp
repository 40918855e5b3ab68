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

// Executable checks of the least-squares and conflation identities.

#ifndef GPMMM_THEORY_CHECKS_HPP_
#define GPMMM_THEORY_CHECKS_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gpmmm::theory {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct OlsFit {
  double slope = kNaN;
  double intercept = kNaN;
  std::vector<double> residuals;
  double slope_se = kNaN;  // NaN with two points
};

// Simple regression of y on x with an intercept. Needs at least three
// points and nonzero variance in x.
OlsFit Ols(const std::vector<double>& x, const std::vector<double>& y);

using Fn = std::function<double(double)>;

struct TaylorDecomposition {
  double term1 = kNaN;  // f'(xbar)
  double term2 = kNaN;  // curvature
  double term3 = kNaN;  // noise
  double reconstruction = kNaN;
  double ols_slope = kNaN;
  bool constant_curvature = false;
  // Range of f'' over the data; the implied factor c in
  // term2 = c m3 / (2 m2) lies inside it.
  double curvature_lo = kNaN;
  double curvature_hi = kNaN;
  double implied_curvature = kNaN;  // NaN when m3 is zero
  // Largest gap between the supplied derivatives and central differences.
  double derivative_check = kNaN;
};

// Splits the OLS slope of y = f(x) + noise into f'(xbar), a curvature term
// and a noise term. With constant f'' the curvature term is exact;
// otherwise it is the residual slope - term1 - term3.
TaylorDecomposition TaylorDecompose(const Fn& f, const Fn& df, const Fn& d2f, const std::vector<double>& x,
                                    const std::vector<double>& noise);

struct PiecewiseBlock {
  int first = 0;  // 0-based, inclusive
  int last = 0;
  bool fitted = false;
  OlsFit fit;
  std::string error;  // set when the block could not be fitted
};

// Consecutive blocks of `tau` points with a separate OLS fit each. A final
// remainder of two or more points is its own block, a single leftover point
// joins the previous block. tau = T reproduces Ols exactly.
std::vector<PiecewiseBlock> PiecewiseOls(const std::vector<double>& x, const std::vector<double>& y, int tau);

// beta_t = y_t / x_t; nullopt where |x_t| < 1e-12.
std::vector<std::optional<double>> RatioEstimator(const std::vector<double>& x, const std::vector<double>& y);

struct RwMoments {
  int periods = 0;
  double tau = 0.0;
  double x0 = 0.0;
  int seeds = 0;
  double analytic_mean = kNaN;  // E x_T = x0
  double analytic_var = kNaN;   // Var x_T = T tau^2
  double mc_mean = kNaN;
  double mc_mean_se = kNaN;
  double mc_var = kNaN;
  double mc_var_se = kNaN;
  double mc_sample_mean = kNaN;  // mean over seeds of xbar(T)
  double mc_sample_mean_se = kNaN;
};

// Random walk x_t = x_{t-1} + N(0, tau^2) from x0, unclamped. Each seed has
// its own stream, so results do not depend on `workers`.
RwMoments RandomWalkMoments(int periods, double tau, double x0, int seeds, std::uint64_t master_seed,
                            int workers = 1);

struct MeanCheck {
  double mean = kNaN;
  double se = kNaN;
  int draws = 0;
};

// Mean of x eps with x and eps independent normals.
MeanCheck NoiseOrthogonality(int draws, std::uint64_t seed);

struct MonotoneDemoConfig {
  int periods = 100;
  int horizon = 10;
  double x_start = 2.0;
  double x_slope = 0.08;     // x_t = x_start + x_slope t + noise
  double x_noise_sd = 0.01;
  double b0 = 1.0;
  double b1 = 0.5;
  double cycle = 80.0;      // beta_t = b0 + b1 sin(2 pi t / cycle)
  double noise_sd = 0.3;
  double delta = 0.0;
  int max_attempts = 20;
};

// Seed used by the shipped monotone demo and its golden checks.
inline constexpr std::uint64_t kMonotoneDemoSeed = 7;

struct MonotoneDemoReport {
  std::uint64_t seed = 0;
  int attempts = 0;
  std::vector<double> spend;
  std::vector<double> beta;
  double reconstruction_residual = kNaN;  // max |h(x_t) x_t - beta_t x_t|
  double shuffled_residual = kNaN;        // same with duplicated spend levels
  double noise_floor = kNaN;
  double nonlinear_mse = kNaN;
  double time_varying_mse = kNaN;
  bool conflated = false;
};

// A time-varying DGP with strictly increasing spend, the static function
// f(x) = h(x) x built from the spend-to-effectiveness map, and holdout fits
// of both GP models. Non-monotone draws are regenerated from sub-seeds.
MonotoneDemoReport MonotoneConflationDemo(std::uint64_t seed, const MonotoneDemoConfig& config = {});

struct Check {
  std::string name;
  bool passed = false;
  double value = kNaN;
  double target = kNaN;
  double tolerance = kNaN;
};

// The fixed identity and Monte Carlo checks; the demo is separate.
std::vector<Check> RunSuite(std::uint64_t seed, int workers = 1);

}  // namespace gpmmm::theory

#endif  // GPMMM_THEORY_CHECKS_HPP_
