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
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "gpmmm/dgp_sim.hpp"
#include "gpmmm/error.hpp"
#include "gpmmm/random.hpp"

namespace gpmmm::eval {
namespace {

// Simpson's rule on the Student-t density.
double TailOracle(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                   std::sqrt(df * std::numbers::pi);
  auto density = [&](double u) { return c * std::pow(1 + u * u / df, -(df + 1) / 2); };
  const int n = 20000;
  const double h = std::abs(t) / n;
  double sum = density(0) + density(std::abs(t));
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4 : 2) * density(i * h);
  return 1.0 - 2.0 * sum * h / 3.0;
}

TEST(ConflationLabelTest, Examples) {
  EXPECT_TRUE(ConflationLabel(1.0, 1.0));
  EXPECT_TRUE(ConflationLabel(1.0, 0.5));
  EXPECT_TRUE(ConflationLabel(1.0, 1.05, 0.1));
  EXPECT_FALSE(ConflationLabel(1.0, 1.05, 0.0));
}

TEST(ConflationLabelTest, ScaleInvariant) {
  Rng rng = MakeRng(5);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng) / 10;
    EXPECT_EQ(ConflationLabel(a, b, d), ConflationLabel(c * a, c * b, d));
  }
}

TEST(ConflationLabelTest, Interval) {
  HoldoutResult truth, comp;
  truth.lower = 1.0;
  truth.upper = 2.0;
  comp.lower = 1.9;
  comp.upper = 3.0;
  EXPECT_TRUE(IntervalConflationLabel(truth, comp));
  comp.lower = 2.1;
  EXPECT_FALSE(IntervalConflationLabel(truth, comp));
}

TEST(HoldoutTest, MeanSquaredError) {
  EXPECT_DOUBLE_EQ(MeanSquaredError({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(MeanSquaredError({0, 0, 0, 0}, {1, -1, 3, -3}), 5.0);
  EXPECT_THROW(MeanSquaredError({1}, {1, 2}), DomainError);
}

TEST(HoldoutTest, RejectsBadHorizon) {
  const sim::SimDataset s = sim::GenSigmoidCase(sim::kSigmoidDefaultSeed);
  EXPECT_THROW(HoldoutEval(s.ToDataset(), mmm::NonlinearSpec(), 0, 1), DomainError);
  EXPECT_THROW(HoldoutEval(s.ToDataset(), mmm::NonlinearSpec(), 100, 1), DomainError);
}

TEST(HoldoutTest, SigmoidModelsConflated) {
  const sim::SimDataset s = sim::GenSigmoidCase(sim::kSigmoidDefaultSeed);
  const HoldoutPair p =
      HoldoutEval(s.ToDataset(), mmm::NonlinearSpec(), mmm::TimeVaryingSpec(), 10,
                  sim::kSigmoidDefaultSeed);
  ASSERT_TRUE(p.first.valid) << p.first.error;
  ASSERT_TRUE(p.second.valid) << p.second.error;
  EXPECT_LT(std::abs(p.first.rmse - p.second.rmse), 0.1 * std::max(p.first.rmse, p.second.rmse));
}

TEST(HoldoutTest, LatentDrawIntervalContainsPointRmse) {
  const sim::SimDataset s = sim::GenSigmoidCase(sim::kSigmoidDefaultSeed);
  const HoldoutResult r = HoldoutEval(s.ToDataset(), mmm::NonlinearSpec(), 10, 3, "nl", 100);
  ASSERT_TRUE(r.valid) << r.error;
  EXPECT_EQ(r.rmse_draws.size(), 100u);
  EXPECT_LE(r.lower, r.upper);
  EXPECT_LE(r.lower, r.rmse_mean);
  EXPECT_GE(r.upper, r.rmse_mean);
}

TEST(OlsTest, ExactLine) {
  Eigen::MatrixXd x(5, 2);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = i + 1;
    y[i] = 2.0 * (i + 1);
  }
  const OlsTable t = Ols(x, y, {"intercept", "x"});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_NEAR(t.rows[1].estimate, 2.0, 1e-12);
  EXPECT_NEAR(t.rows[0].estimate, 0.0, 1e-12);
  EXPECT_LT(t.residuals.norm(), 1e-12);
  EXPECT_LT(t.rows[1].p, 1e-12);
}

TEST(OlsTest, PureInterceptGivesZeroDummies) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(9, 3);
  x.col(0).setOnes();
  for (int i = 0; i < 9; ++i) {
    x(i, 1) = i % 3 == 1;
    x(i, 2) = i % 3 == 2;
  }
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(9, 4.0);
  const OlsTable t = Ols(x, y, {"intercept", "medium", "high"});
  EXPECT_NEAR(t.rows[0].estimate, 4.0, 1e-12);
  EXPECT_NEAR(t.rows[1].estimate, 0.0, 1e-12);
  EXPECT_NEAR(t.rows[2].estimate, 0.0, 1e-12);
}

TEST(OlsTest, ResidualsOrthogonal) {
  Rng rng = MakeRng(9);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x(40, 4);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = 1;
    for (int j = 1; j < 4; ++j) x(i, j) = n(rng);
    y[i] = 1 + x(i, 1) - 2 * x(i, 3) + n(rng);
  }
  const OlsTable t = Ols(x, y, {"c", "a", "b", "d"});
  EXPECT_LT((x.transpose() * t.residuals).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(t.df, 36);
}

TEST(OlsTest, DropsAliasedColumns) {
  Eigen::MatrixXd x(6, 4);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = 1;
    x(i, 1) = i;
    x(i, 2) = 2 * i + 1;
    x(i, 3) = 0;
    y[i] = i * i;
  }
  const OlsTable t = Ols(x, y, {"c", "a", "b", "z"});
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.dropped.size(), 2u);
  EXPECT_FALSE(t.warnings.empty());
}

TEST(StudentTest, MatchesIntegrationOracle) {
  EXPECT_NEAR(StudentTwoSidedP(2.0, 10), 0.0734, 5e-4);
  for (double t : {0.3, 1.0, 2.0, 3.5})
    for (double df : {3.0, 10.0, 40.0}) EXPECT_NEAR(StudentTwoSidedP(t, df), TailOracle(t, df), 1e-8);
  EXPECT_DOUBLE_EQ(StudentTwoSidedP(0.0, 5), 1.0);
  EXPECT_NEAR(StudentTwoSidedP(-2.0, 10), StudentTwoSidedP(2.0, 10), 1e-15);
}

TEST(FactorTest, LevelsAndGrid) {
  EXPECT_EQ(FactorValues(Factor::kSmoothness), (std::array<double, 3>{0.1, 0.5, 1.0}));
  EXPECT_EQ(FactorValues(Factor::kCarryover), (std::array<double, 3>{0.0, 0.3, 0.8}));
  EXPECT_EQ(FactorsFor(sim::DgpKind::kHill).size(), 6u);
  const auto grid = FullGrid(1, 100, 10);
  ASSERT_EQ(grid.size(), 3u * 729u);
  std::set<std::string> labels;
  for (const auto& s : grid) {
    labels.insert(s.Label());
    for (Factor f : FactorsFor(s.dgp)) {
      const auto& v = FactorValues(f);
      EXPECT_NE(std::find(v.begin(), v.end(), s.Value(f)), v.end());
    }
  }
  EXPECT_EQ(labels.size(), grid.size());
}

std::vector<SimulationSetting> SmallGrid() {
  SimulationSetting a = MidSetting(sim::DgpKind::kNonlinearGP, 0);
  SimulationSetting b = MidSetting(sim::DgpKind::kTimeVaryingGP, 1);
  a.replicates = b.replicates = 3;
  a.periods = b.periods = 40;
  a.holdout = b.holdout = 5;
  return {a, b};
}

TEST(MegasimTest, DeterministicAcrossWorkers) {
  MegasimOptions one;
  one.master_seed = 77;
  one.workers = 1;
  MegasimOptions three = one;
  three.workers = 3;
  const MegasimResult r1 = Megasim(SmallGrid(), one);
  const MegasimResult r3 = Megasim(SmallGrid(), three);
  ASSERT_EQ(r1.records.size(), 6u);
  ASSERT_EQ(r1.records.size(), r3.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    EXPECT_EQ(r1.records[i].seed, r3.records[i].seed);
    EXPECT_EQ(r1.records[i].true_mse, r3.records[i].true_mse);
    EXPECT_EQ(r1.records[i].competing_mse, r3.records[i].competing_mse);
    EXPECT_EQ(r1.records[i].conflated, r3.records[i].conflated);
  }
  for (std::size_t i = 0; i < r1.rates.size(); ++i) EXPECT_EQ(r1.rates[i].rate, r3.rates[i].rate);
}

TEST(MegasimTest, SeedsUnique) {
  std::set<std::uint64_t> seeds;
  const auto grid = FullGrid(5, 100, 10);
  for (const auto& s : grid)
    for (int r = 0; r < s.replicates; ++r)
      seeds.insert(DeriveSeed(9, {static_cast<std::uint64_t>(s.id), static_cast<std::uint64_t>(r)}));
  EXPECT_EQ(seeds.size(), grid.size() * 5);
}

TEST(MegasimTest, AggregationIgnoresOrderAndInvalid) {
  std::vector<SimulationSetting> grid = {MidSetting(sim::DgpKind::kNonlinearGP, 0),
                                         MidSetting(sim::DgpKind::kNonlinearGP, 1)};
  std::vector<ConflationRecord> recs;
  for (int r = 0; r < 4; ++r) {
    ConflationRecord c;
    c.setting_id = 0;
    c.replicate = r;
    c.valid = r != 3;
    c.conflated = r == 0;
    recs.push_back(c);
  }
  ConflationRecord bad;
  bad.setting_id = 1;
  bad.valid = false;
  bad.error = "fit failed";
  recs.push_back(bad);
  std::vector<ConflationRecord> shuffled(recs.rbegin(), recs.rend());
  const auto a = AggregateRates(grid, recs);
  const auto b = AggregateRates(grid, shuffled);
  ASSERT_TRUE(a[0].rate.has_value());
  EXPECT_DOUBLE_EQ(*a[0].rate, 1.0 / 3.0);
  EXPECT_EQ(a[0].invalid, 1);
  EXPECT_EQ(a[0].rate, b[0].rate);
  EXPECT_FALSE(a[1].rate.has_value());
  EXPECT_FALSE(a[1].diagnostics.empty());
}

TEST(MegasimTest, AnyMajor) {
  std::vector<SimulationSetting> grid;
  std::vector<SettingRate> rates;
  const double values[] = {0.0, 0.1, 0.3, 0.25};
  for (int i = 0; i < 4; ++i) {
    grid.push_back(MidSetting(sim::DgpKind::kTimeVaryingGP, i));
    SettingRate r;
    r.setting_id = i;
    r.rate = values[i];
    rates.push_back(r);
  }
  const auto s = SummarizeAnyMajor(grid, rates);
  const auto it = std::find_if(s.begin(), s.end(),
                               [](const AnyMajor& a) { return a.dgp == sim::DgpKind::kTimeVaryingGP; });
  ASSERT_NE(it, s.end());
  EXPECT_EQ(it->settings, 4);
  EXPECT_DOUBLE_EQ(it->any, 0.75);
  EXPECT_DOUBLE_EQ(it->major, 0.25);
}

TEST(RateRegressionTest, RecoversPlantedEffects) {
  const auto full = FullGrid(1, 100, 10);
  std::vector<SimulationSetting> grid;
  std::vector<SettingRate> rates;
  for (const auto& s : full) {
    if (s.dgp != sim::DgpKind::kNonlinearGP) continue;
    grid.push_back(s);
    SettingRate r;
    r.setting_id = s.id;
    r.rate = 0.1 + 0.2 * (s.Level(Factor::kNoise) == 2) + 0.05 * (s.Level(Factor::kSmoothness) == 1);
    rates.push_back(r);
  }
  const OlsTable t = RateRegression(grid, rates, sim::DgpKind::kNonlinearGP);
  for (const auto& row : t.rows) {
    if (row.name == "intercept") EXPECT_NEAR(row.estimate, 10.0, 1e-8);
    else if (row.name == "noise:high") EXPECT_NEAR(row.estimate, 20.0, 1e-8);
    else if (row.name == "smoothness:medium") EXPECT_NEAR(row.estimate, 5.0, 1e-8);
    else EXPECT_NEAR(row.estimate, 0.0, 1e-8) << row.name;
  }
  EXPECT_EQ(t.rows.size(), 13u);
}

}  // namespace
}  // namespace gpmmm::eval
