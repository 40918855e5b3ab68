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
#include <numeric>

#include <gtest/gtest.h>

#include "gpmmm/error.hpp"
#include "gpmmm/transforms.hpp"

namespace gpmmm::sim {
namespace {

double Corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(GenSpendingTest, ConstantWithoutDynamics) {
  const SpendingPath p = GenSpending({7.0, 0.0, 0.0, 50.0, 20, 0.0}, 1);
  EXPECT_EQ(p.values.front(), 50.0);
  for (std::size_t t = 1; t < p.values.size(); ++t) EXPECT_EQ(p.values[t], 7.0);
}

TEST(GenSpendingTest, RandomWalkMoments) {
  const int T = 50;
  const double tau = 2.0, x0 = 10.0;
  std::vector<double> last;
  for (int s = 0; s < 2000; ++s)
    last.push_back(GenSpending({0.0, 1.0, tau, x0, T, SpendingSpec::kNoClamp}, 1000 + s).values.back());
  const double mean = std::accumulate(last.begin(), last.end(), 0.0) / 2000.0;
  EXPECT_NEAR(mean, x0, 3 * tau * std::sqrt(T) / std::sqrt(2000.0));
  // T - 1 innovations after x_1 = x0.
  const double var = std::pow(SampleSd(last), 2);
  EXPECT_NEAR(var / ((T - 1) * tau * tau), 1.0, 0.15);
}

TEST(GenSpendingTest, ClampCounted) {
  const SpendingPath p = GenSpending({0.0, 1.0, 30.0, 1.0, 200, 0.0}, 5);
  EXPECT_GT(p.clamped, 0);
  for (double v : p.values) EXPECT_GE(v, 0.0);
}

TEST(GenDatasetTest, NoiseFreeAndTruthRecord) {
  for (DgpKind kind : {DgpKind::kNonlinearGP, DgpKind::kTimeVaryingGP, DgpKind::kHill}) {
    DgpSpec d;
    d.kind = kind;
    d.noise_ratio = 0.0;
    const SimDataset s = GenDataset(d, {}, 4);
    EXPECT_EQ(s.outcome, s.deterministic);
    d.noise_ratio = 0.3;
    const SimDataset n = GenDataset(d, {}, 4);
    for (std::size_t i = 0; i < n.outcome.size(); ++i)
      EXPECT_NEAR(n.outcome[i] - n.noise[i], n.deterministic[i],
                  1e-12 * (1.0 + std::abs(n.deterministic[i])));
  }
}

TEST(GenDatasetTest, Deterministic) {
  DgpSpec d;
  d.kind = DgpKind::kTimeVaryingGP;
  d.carryover = transforms::StockSpec{0.5, 4};
  const SimDataset a = GenDataset(d, {}, 9), b = GenDataset(d, {}, 9);
  EXPECT_EQ(a.outcome, b.outcome);
  EXPECT_EQ(a.spend_raw, b.spend_raw);
  EXPECT_EQ(a.spend_raw.size(), a.spend.size() + 4);
}

TEST(GenDatasetTest, ZeroAmplitudeTimeVarying) {
  DgpSpec d;
  d.kind = DgpKind::kTimeVaryingGP;
  d.amplitude = 1e-12;
  d.noise_ratio = 0.0;
  d.intercept = 3.0;
  const SimDataset s = GenDataset(d, {}, 2);
  for (double y : s.outcome) EXPECT_NEAR(y, 3.0, 1e-6);
}

TEST(GenDatasetTest, RhoResolution) {
  DgpSpec d;
  d.kind = DgpKind::kTimeVaryingGP;
  d.smoothness = 0.5;
  SpendingSpec sp;
  const SimDataset a = GenDataset(d, sp, 1);
  sp.sd = 50.0;
  const SimDataset b = GenDataset(d, sp, 1);
  EXPECT_EQ(a.resolved_rho, b.resolved_rho);
  EXPECT_DOUBLE_EQ(a.resolved_rho, 0.5 * 99);

  d.kind = DgpKind::kNonlinearGP;
  const SimDataset c = GenDataset(d, sp, 1);
  const auto [lo, hi] = std::minmax_element(c.spend.begin(), c.spend.end());
  EXPECT_DOUBLE_EQ(c.resolved_rho, 0.5 * (*hi - *lo));
}

TEST(GenDatasetTest, DegenerateSpendRange) {
  DgpSpec d;
  EXPECT_THROW(GenDataset(d, {7.0, 0.0, 0.0, 7.0, 20, 0.0}, 1), DomainError);
}

TEST(GenDatasetTest, HillMidpoint) {
  DgpSpec d;
  d.kind = DgpKind::kHill;
  d.hill_shape = 2.0;
  d.hill_k_ratio = 0.33;
  d.noise_ratio = 0.05;
  d.intercept = 1.0;
  // Linear ramp from 0 to 30 so range(x) = 30 and k = 9.9.
  SpendingSpec sp{1.0, 1.0, 0.0, 0.0, 31, 0.0};
  const SimDataset s = GenDataset(d, sp, 3);
  EXPECT_NEAR(s.resolved_k, 9.9, 1e-12);
  const double expected = 1.0 + d.hill_amplitude / 2;
  const double det = d.intercept + d.hill_amplitude * transforms::Hill(9.9, {9.9, 2.0});
  EXPECT_DOUBLE_EQ(det, expected);
  // Period with x = 10 sits next to the midpoint; the outcome is within 3 sigma of its truth.
  EXPECT_NEAR(s.outcome[10], s.deterministic[10], 3 * s.sigma);
  EXPECT_NEAR(s.deterministic[10], expected, 0.2);
}

TEST(GenDatasetTest, NoiseCalibration) {
  DgpSpec d;
  d.kind = DgpKind::kHill;
  d.noise_ratio = 0.4;
  SpendingSpec sp;
  sp.periods = 10000;
  const SimDataset s = GenDataset(d, sp, 12);
  EXPECT_NEAR(SampleSd(s.noise) / (0.4 * SampleSd(s.deterministic)), 1.0, 0.03);
}

TEST(IntroExampleTest, NoiselessAffineSpend) {
  IntroConfig c;
  c.spend_noise_sd = 0.0;
  c.outcome_noise_sd = 0.0;
  const SimDataset s = GenIntroExample(1, c);
  std::vector<double> lagged;
  for (int t : s.periods) lagged.push_back(c.Beta(t - c.lag));
  EXPECT_NEAR(Corr(s.spend, lagged), 1.0, 1e-12);
}

TEST(IntroExampleTest, ConstantBetaIsLinear) {
  IntroConfig c;
  c.b1 = 0.0;
  c.outcome_noise_sd = 1e-9;
  const SimDataset s = GenIntroExample(2, c);
  const double r = Corr(s.spend, s.outcome);
  EXPECT_GT(r * r, 0.99);
}

TEST(IntroExampleTest, ScatterLooksSingleValued) {
  IntroConfig c;
  const SimDataset s = GenIntroExample(7, c);
  std::vector<std::size_t> order(s.spend.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.spend[a] < s.spend[b]; });
  const std::size_t n = order.size();
  for (int bin = 0; bin < 10; ++bin) {
    std::vector<double> ys;
    for (std::size_t i = n * bin / 10; i < n * (bin + 1) / 10; ++i) ys.push_back(s.outcome[order[i]]);
    EXPECT_LT(SampleSd(ys), 3 * c.outcome_noise_sd) << "bin " << bin;
  }
}

TEST(SigmoidCaseTest, Shape) {
  SigmoidConfig c;
  EXPECT_NEAR(c.Response(c.midpoint), (c.y_min + c.y_max) / 2, 1e-9);
  c.noise_ratio = 0.0;
  const SimDataset s = GenSigmoidCase(kSigmoidDefaultSeed, c);
  std::vector<std::size_t> order(s.spend.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.spend[a] < s.spend[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    EXPECT_GE(s.outcome[order[i]], s.outcome[order[i - 1]]);
  const auto [lo, hi] = std::minmax_element(s.spend.begin(), s.spend.end());
  EXPECT_LT(*lo, c.midpoint);
  EXPECT_GT(*hi, c.midpoint);
}

TEST(GpPathTest, ConsistentExtension) {
  GpPath path(kernels::Kernel::SE(1.0, 2.0), 3);
  const double a = path.At(1.0);
  const double b = path.At(5.0);
  EXPECT_EQ(path.At(1.0), a);
  EXPECT_EQ(path.At(5.0), b);
  // Nearby points stay close for a smooth kernel.
  EXPECT_NEAR(path.At(1.001), a, 0.01);
}

}  // namespace
}  // namespace gpmmm::sim
