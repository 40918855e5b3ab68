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

#include "gpmmm/kernels.hpp"

#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "gpmmm/error.hpp"

namespace gpmmm::kernels {
namespace {

std::vector<Kernel> Samples() {
  auto series = std::make_shared<const ScaleSeries>(0, std::vector<double>{1.0, 2.0, 0.5, 3.0, 1.5});
  return {Kernel::SE(1.3, 0.7), Kernel::Periodic(0.8, 1.1, 12.0),
          Kernel::MakeTrendSeason({1.0, 5.0}, {0.5, 0.9, 7.0}),
          Kernel::MakeScaledTime({1.2, 2.0}, series),
          Kernel::MakeSum({Kernel::SE(1.0, 1.0), Kernel::Periodic(0.3, 2.0, 4.0)})};
}

TEST(KernelsTest, Evaluate) {
  EXPECT_DOUBLE_EQ(Evaluate(Kernel::SE(2, 1), 0, 0), 4.0);
  EXPECT_NEAR(Evaluate(Kernel::SE(1, 1), 0, std::sqrt(2.0)), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(Evaluate(Kernel::Periodic(3, 1, 12), 0, 12), 9.0, 1e-12);
  EXPECT_THROW(Evaluate(Kernel::SE(1, 1), 0, std::nan("")), DomainError);
  EXPECT_THROW(Evaluate(Kernel::SE(1, -1), 0, 1), DomainError);
}

TEST(KernelsTest, PeriodicClosedForm) {
  const Kernel k = Kernel::Periodic(1.5, 0.8, 10.0);
  const double s = std::sin(M_PI * 3.0 / 10.0);
  EXPECT_NEAR(Evaluate(k, 1.0, 4.0), 2.25 * std::exp(-2.0 * s * s / 0.64), 1e-14);
}

TEST(KernelsTest, GramExamples) {
  const std::vector<double> one = {0.0};
  EXPECT_DOUBLE_EQ(Gram(Kernel::SE(1, 1), one)(0, 0), 1.0);
  const std::vector<double> far = {0.0, 10.0};
  EXPECT_LT(Gram(Kernel::SE(1, 0.2), far)(0, 1), 1e-300);
  const std::vector<double> v = {0.0, 0.5, 2.0, 3.5};
  const Eigen::MatrixXd g = Gram(Kernel::SE(1, 1), v, 0.1);
  EXPECT_DOUBLE_EQ(g(2, 2), 1.1);
  EXPECT_TRUE((Gram(Kernel::MakeSum({Kernel::SE(1, 1), Kernel::SE(1, 1)}), v) -
               2.0 * Gram(Kernel::SE(1, 1), v)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST(KernelsTest, CrossConsistency) {
  const std::vector<double> v = {0.0, 1.0, 2.0, 3.0, 4.0};
  for (const Kernel& k : Samples())
    EXPECT_LT((Cross(k, v, v) - Gram(k, v)).cwiseAbs().maxCoeff(), 1e-14) << Describe(k);
}

TEST(KernelsTest, ScaledTimeScaling) {
  const std::vector<double> t = {0.0, 1.0, 2.0};
  auto ones = std::make_shared<const ScaleSeries>(0, std::vector<double>{1.0, 1.0, 1.0});
  auto zeros = std::make_shared<const ScaleSeries>(0, std::vector<double>{0.0, 0.0, 0.0});
  const Kernel st1 = Kernel::MakeScaledTime({1.4, 0.9}, ones);
  EXPECT_LT((Cross(st1, t, t) - Cross(Kernel::SE(1.4, 0.9), t, t)).cwiseAbs().maxCoeff(), 1e-15);
  const Kernel st0 = Kernel::MakeScaledTime({1.4, 0.9}, zeros);
  EXPECT_EQ(Cross(st0, t, t).cwiseAbs().maxCoeff(), 0.0);

  // Prediction-time scale for periods the series does not cover.
  const std::vector<double> future = {5.0};
  const std::vector<double> scale = {2.0};
  const Eigen::MatrixXd c = Cross(st1, future, t, std::span<const double>(scale));
  EXPECT_NEAR(c(0, 2), 2.0 * Evaluate(Kernel::SE(1.4, 0.9), 5.0, 2.0), 1e-15);
  EXPECT_THROW(Cross(st1, future, t), DomainError);
}

TEST(KernelsTest, InducedKernelEquivalence) {
  std::vector<double> t(12);
  for (int i = 0; i < 12; ++i) t[static_cast<std::size_t>(i)] = i;
  const double c = 2.5;
  auto series = std::make_shared<const ScaleSeries>(0, std::vector<double>(12, c));
  const Eigen::MatrixXd a = Gram(Kernel::MakeScaledTime({0.7, 3.0}, series), t);
  const Eigen::MatrixXd b = Gram(Kernel::SE(0.7 * c, 3.0), t);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(KernelsTest, SymmetryAndDominance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (const Kernel& k : Samples()) {
    for (int i = 0; i < 200; ++i) {
      const double z = std::floor(u(rng)), z2 = std::floor(u(rng));
      EXPECT_DOUBLE_EQ(Evaluate(k, z, z2), Evaluate(k, z2, z));
    }
  }
  for (const Kernel& k : {Kernel::SE(1.3, 0.7), Kernel::MakeTrendSeason({1.0, 5.0}, {0.5, 0.9, 7.0})}) {
    for (int i = 0; i < 200; ++i) {
      const double z = u(rng), z2 = u(rng);
      EXPECT_GE(Evaluate(k, z, z), Evaluate(k, z, z2));
    }
  }
}

TEST(KernelsTest, PositiveSemidefinite) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(2, 50);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  const std::vector<Kernel> ks = {Kernel::SE(1.3, 0.7), Kernel::Periodic(0.8, 1.1, 12.0),
                                  Kernel::MakeTrendSeason({1.0, 5.0}, {0.5, 0.9, 7.0})};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(size(rng)));
    for (double& x : v) x = u(rng);
    const Kernel& k = ks[static_cast<std::size_t>(trial) % ks.size()];
    const Eigen::MatrixXd g = Gram(k, v, 1e-8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-6) << Describe(k);
  }
}

TEST(KernelsTest, PeriodicityAndSumClosure) {
  const Kernel p = Kernel::Periodic(1.2, 0.6, 9.0);
  for (double z = -5; z < 5; z += 0.37)
    EXPECT_NEAR(Evaluate(p, z, 1.3), Evaluate(p, z, 1.3 + 9.0), 1e-12);
  const std::vector<double> v = {0.0, 0.3, 1.7, 4.0, 9.5};
  const Kernel a = Kernel::SE(1.0, 2.0), b = Kernel::Periodic(0.4, 1.0, 3.0);
  EXPECT_LT((Gram(Kernel::MakeSum({a, b}), v) - Gram(a, v) - Gram(b, v)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KernelsTest, StableCholeskyEscalates) {
  const std::vector<double> v = {0.0, 1e-9, 2e-9};
  const Eigen::MatrixXd g = Gram(Kernel::SE(1, 1), v);
  const Factor f = StableCholesky(g, false);
  EXPECT_GT(f.jitter, 0.0);
  Eigen::MatrixXd target = g;
  target.diagonal().array() += f.jitter;
  EXPECT_LT((f.lower * f.lower.transpose() - target).norm() / target.norm(), 1e-8);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(1, 1) = -1.0;
  EXPECT_THROW(StableCholesky(bad, true, "broken"), FactorizationError);
}

}  // namespace
}  // namespace gpmmm::kernels
