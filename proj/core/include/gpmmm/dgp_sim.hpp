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

// Synthetic data: AR(1) spending, the three simulation DGP families, the
// cyclical-effectiveness illustration and the sigmoid optimization case.

#ifndef GPMMM_DGP_SIM_HPP_
#define GPMMM_DGP_SIM_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpmmm/dataset.hpp"
#include "gpmmm/kernels.hpp"
#include "gpmmm/transforms.hpp"

namespace gpmmm::sim {

// x_1 = initial; x_t = max(clamp_floor, N(drift + ar_coef x_{t-1}, sd^2)).
struct SpendingSpec {
  double drift = 25.0;
  double ar_coef = 0.5;
  double sd = 5.0;
  double initial = 50.0;
  int periods = 100;
  double clamp_floor = 0.0;  // -infinity disables clamping

  static constexpr double kNoClamp = -std::numeric_limits<double>::infinity();
};

struct SpendingPath {
  std::vector<double> values;
  int clamped = 0;
};

SpendingPath GenSpending(const SpendingSpec& spec, std::uint64_t seed);

enum class DgpKind { kNonlinearGP, kTimeVaryingGP, kHill };

const char* ToString(DgpKind kind);
DgpKind DgpKindFromString(const std::string& s);

struct DgpSpec {
  DgpKind kind = DgpKind::kNonlinearGP;
  double amplitude = 2.0;    // GP eta
  double smoothness = 0.5;   // rho as a fraction of the input range
  double hill_shape = 2.0;
  double hill_k_ratio = 0.33;  // k as a fraction of range(x)
  double hill_amplitude = 10.0;
  double noise_ratio = 0.1;  // sigma / sd(deterministic part)
  std::optional<transforms::StockSpec> carryover;
  double intercept = 0.0;
};

struct SimDataset {
  std::vector<int> periods;        // 1..T
  std::vector<double> spend_raw;   // T + L draws, the first L precede period 1
  std::vector<double> spend;       // post-carryover, aligned with periods
  std::vector<double> outcome;
  std::vector<double> deterministic;
  std::vector<double> noise;
  std::vector<double> effect;      // f(x_t), beta_t or hill(x_t)
  double sigma = 0.0;
  double resolved_rho = 0.0;
  double resolved_k = 0.0;
  int clamped = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> log;

  // Single-channel dataset on the post-carryover spend.
  Dataset ToDataset(const std::string& channel = "spend") const;
};

SimDataset GenDataset(const DgpSpec& dgp, const SpendingSpec& spending, std::uint64_t seed);

// Sample sd (n - 1 denominator); 0 for fewer than two values.
double SampleSd(const std::vector<double>& v);

// Effectiveness cycles as beta_t = b0 + b1 sin(2 pi t / P) and spend follows
// it with a lag: x_t = c0 + c1 beta_{t - lag} + noise; y_t = beta_t x_t + e_t.
// The constants are calibrated for shape, not taken from any table.
struct IntroConfig {
  int periods = 96;
  int cycle = 24;
  int lag = 2;
  double b0 = 1.0;
  double b1 = 0.6;
  double c0 = -2.0;
  double c1 = 7.5;
  double spend_noise_sd = 0.3;
  double outcome_noise_sd = 1.2;
  double spend_floor = 0.1;

  double Beta(double t) const;
};

SimDataset GenIntroExample(std::uint64_t seed, const IntroConfig& config = {});

// Revenue is a sigmoid in log spend:
//   y = y_min + (y_max - y_min) / (1 + exp(-(ln x - ln midpoint) / width))
// with highly autocorrelated AR(1) spending. Calibrated constants.
struct SigmoidConfig {
  int periods = 100;
  double y_min = 12000.0;
  double y_max = 22000.0;
  double midpoint = 10000.0;
  double width = 0.2;
  double noise_ratio = 0.05;
  SpendingSpec spending{300.0, 0.97, 300.0, 10000.0, 100, 500.0};

  double Response(double x) const;
};

// Seed used by the shipped sigmoid example and its golden checks.
inline constexpr std::uint64_t kSigmoidDefaultSeed = 20240639;

SimDataset GenSigmoidCase(std::uint64_t seed, const SigmoidConfig& config = {});

// A GP sample path that can be extended: values at new inputs are drawn from
// the GP conditional on everything drawn so far. Repeated inputs return the
// stored value.
class GpPath {
 public:
  GpPath(kernels::Kernel kernel, std::uint64_t seed);
  // Seeds the path with an existing draw.
  void Assign(std::vector<double> inputs, std::vector<double> values);
  double At(double input);
  const std::vector<double>& inputs() const { return inputs_; }
  const std::vector<double>& values() const { return values_; }

 private:
  kernels::Kernel kernel_;
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::vector<double> inputs_;
  std::vector<double> values_;
};

}  // namespace gpmmm::sim

#endif  // GPMMM_DGP_SIM_HPP_
