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

#include "gpmmm/transforms.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gpmmm/error.hpp"

namespace gpmmm::transforms {
namespace {

TEST(HillTest, Examples) {
  for (double s : {0.3, 1.0, 2.0, 7.0}) EXPECT_DOUBLE_EQ(Hill(4.0, {4.0, s}), 0.5);
  EXPECT_DOUBLE_EQ(Hill(1.0, {1.0, 1.0}), 0.5);
  for (double x : {0.01, 0.5, 2.0, 13.0}) EXPECT_NEAR(Hill(x, {3.0, 1.0}), x / (x + 3.0), 1e-15);
  EXPECT_EQ(Hill(0.0, {2.0, 2.0}), 0.0);
  EXPECT_THROW(Hill(-1.0, {1.0, 1.0}), DomainError);
}

TEST(HillTest, MonotoneBoundedAndStepLimit) {
  double prev = 0.0;
  for (double x = 0.05; x < 50.0; x += 0.05) {
    const double h = Hill(x, {5.0, 2.5});
    EXPECT_GT(h, prev);
    EXPECT_LT(h, 1.0);
    prev = h;
  }
  EXPECT_LT(Hill(0.9 * 5.0, {5.0, 50.0}), 0.1);
  EXPECT_GT(Hill(1.1 * 5.0, {5.0, 50.0}), 0.9);
}

TEST(StockWeightsTest, Geometric) {
  const auto w = StockWeights({0.5, 2});
  EXPECT_NEAR(w[0], 4.0 / 7, 1e-15);
  EXPECT_NEAR(w[1], 2.0 / 7, 1e-15);
  EXPECT_NEAR(w[2], 1.0 / 7, 1e-15);
  EXPECT_EQ(StockWeights({0.0, 3}), (std::vector<double>{1, 0, 0, 0}));
}

// (1 - p/q)^l C(n, k) as an exact fraction; returns the normalized weights.
std::vector<double> ExactPascal(long p, long q, int tau, int lags, bool printed) {
  auto binom = [](long n, long k) -> long {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  // Common denominator q^L: numerator_l = (q - p)^l q^(L - l) C(...).
  std::vector<long> num(static_cast<std::size_t>(lags + 1));
  for (int l = 0; l <= lags; ++l) {
    long v = printed ? binom(l + tau - 1, tau) : binom(l + tau - 1, l);
    for (int i = 0; i < l; ++i) v *= (q - p);
    for (int i = l; i < lags; ++i) v *= q;
    num[static_cast<std::size_t>(l)] = v;
  }
  const long total = std::accumulate(num.begin(), num.end(), 0L);
  std::vector<double> w;
  for (long v : num) w.push_back(static_cast<double>(v) / static_cast<double>(total));
  return w;
}

TEST(StockWeightsTest, PascalMatchesGoldenAndExactOracle) {
  std::ifstream in(std::string(GPMMM_TEST_DATA_DIR) + "/pascal_weights.txt");
  ASSERT_TRUE(in.good());
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string conv;
    long p = 0, q = 1;
    int tau = 0, lags = 0;
    is >> conv >> p >> q >> tau >> lags;
    std::vector<double> golden(static_cast<std::size_t>(lags + 1));
    for (double& g : golden) is >> g;
    const bool printed = conv == "printed";
    StockSpec spec{static_cast<double>(p) / static_cast<double>(q), lags, StockFamily::kPascal, tau,
                   printed ? BinomialConvention::kPrinted : BinomialConvention::kStandard};
    const auto w = StockWeights(spec);
    const auto exact = ExactPascal(p, q, tau, lags, printed);
    for (std::size_t l = 0; l < golden.size(); ++l) {
      EXPECT_NEAR(exact[l], golden[l], 1e-15) << line;
      EXPECT_NEAR(w[l], golden[l], 1e-14) << line;
    }
    ++cases;
  }
  EXPECT_EQ(cases, 8);
}

TEST(StockWeightsTest, DefaultConventionIsPrinted) {
  StockSpec spec{0.5, 2, StockFamily::kPascal, 2};
  const auto w = StockWeights(spec);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[1], 0.4, 1e-15);
  EXPECT_NEAR(w[2], 0.6, 1e-15);
}

TEST(StockWeightsTest, AllZeroPascalRejected) {
  // Printed convention with L = 0: C(tau - 1, tau) = 0.
  StockSpec spec{0.5, 0, StockFamily::kPascal, 3};
  EXPECT_THROW(StockWeights(spec), DomainError);
}

TEST(StockWeightsTest, SumToOneAndNonnegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    StockSpec spec{lam(rng), 1 + i % 12, i % 2 ? StockFamily::kPascal : StockFamily::kGeometric,
                   1 + i % 3, i % 4 < 2 ? BinomialConvention::kPrinted : BinomialConvention::kStandard};
    const auto w = StockWeights(spec);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    for (double v : w) EXPECT_GE(v, 0.0);
  }
}

TEST(AdstockTest, Examples) {
  const std::vector<double> x = {1, 2, 4};
  const auto s = Adstock(x, {0.5, 2});
  ASSERT_EQ(s.values.size(), 1u);
  EXPECT_EQ(s.offset, 2);
  EXPECT_EQ(s.values[0], 3.0);

  const std::vector<double> y = {3, 1, 4, 1, 5, 9};
  const auto id = Adstock(y, {0.0, 2});
  EXPECT_EQ(id.values, (std::vector<double>{4, 1, 5, 9}));
  const std::vector<double> c(10, 7.5);
  for (double v : Adstock(c, {0.7, 4}).values) EXPECT_NEAR(v, 7.5, 1e-12);
  EXPECT_THROW(Adstock(x, {0.5, 3}), DomainError);
}

TEST(AdstockTest, LinearAndConvex) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> x(40), z(40), comb(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = u(rng);
    z[i] = u(rng);
    comb[i] = 2.5 * x[i] - 1.5 * z[i];
  }
  const StockSpec spec{0.6, 5, StockFamily::kPascal, 2, BinomialConvention::kStandard};
  const auto ax = Adstock(x, spec).values, az = Adstock(z, spec).values, ac = Adstock(comb, spec).values;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  for (std::size_t i = 0; i < ax.size(); ++i) {
    EXPECT_NEAR(ac[i], 2.5 * ax[i] - 1.5 * az[i], 1e-10);
    EXPECT_GE(ax[i], *lo);
    EXPECT_LE(ax[i], *hi);
  }
}

TEST(KoyckTest, MatchesUnnormalizedConvolution) {
  EXPECT_EQ(KoyckStep(5.0, 2.0, 0.0), 2.0);
  EXPECT_EQ(KoyckStep(0.0, 2.0, 0.7), 2.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> x(50);
  for (double& v : x) v = u(rng);
  double stock = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    stock = KoyckStep(stock, x[t], 0.5);
    double direct = 0.0;
    for (std::size_t l = 0; l <= t; ++l) direct += std::pow(0.5, static_cast<double>(l)) * x[t - l];
    EXPECT_NEAR(stock, direct, 1e-9);
  }
}

TEST(LogGuardTest, Examples) {
  const std::vector<double> v = {std::exp(1.0), 0.0, 2.0};
  const auto g = LogGuard(v, 1e-6);
  EXPECT_NEAR(g.values[0], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.values[1], std::log(1e-6));
  EXPECT_EQ(g.floored, (std::vector<bool>{false, true, false}));
  EXPECT_EQ(g.floored_count, 1);
  const std::vector<double> pos = {0.5, 3.0};
  const auto p = LogGuard(pos, 1e-6);
  EXPECT_EQ(p.floored_count, 0);
  EXPECT_EQ(p.values[1], std::log(3.0));
}

}  // namespace
}  // namespace gpmmm::transforms
