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

// Media transforms: Hill saturation, AdStock carryover (geometric and Pascal
// weights), the Koyck recursion and guarded logs.

#ifndef GPMMM_TRANSFORMS_HPP_
#define GPMMM_TRANSFORMS_HPP_

#include <span>
#include <vector>

namespace gpmmm::transforms {

struct HillParams {
  double k = 1.0;  // inflection, spend units
  double s = 1.0;  // shape
};

// 1 / (1 + (x/k)^-s); hill(0) = 0. Throws DomainError for x < 0.
double Hill(double x, const HillParams& p);

enum class StockFamily { kGeometric, kPascal };

// Which binomial coefficient the Pascal weights use.
//   kPrinted:  C(l + tau - 1, tau)
//   kStandard: C(l + tau - 1, l), the usual negative-binomial PMF
enum class BinomialConvention { kPrinted, kStandard };

struct StockSpec {
  double decay = 0.0;  // lambda in [0, 1]
  int lags = 0;        // L
  StockFamily family = StockFamily::kGeometric;
  int pascal_shape = 1;
  BinomialConvention convention = BinomialConvention::kPrinted;
};

void Validate(const StockSpec& spec);

// L + 1 nonnegative weights summing to 1. Geometric: lambda^l with 0^0 = 1.
// Pascal: (1 - lambda)^l * C(...) (lambda^tau cancels under normalization).
// A Pascal spec whose raw weights are all zero throws DomainError.
std::vector<double> StockWeights(const StockSpec& spec);

// Output element i corresponds to input period i + L:
//   out[i] = sum_l w_l x[i + L - l].
// The first L periods are dropped. Throws DomainError if x has <= L entries.
struct StockSeries {
  std::vector<double> values;
  int offset = 0;  // = L
};
StockSeries Adstock(std::span<const double> x, const StockSpec& spec);

// x + lambda * prev_stock.
double KoyckStep(double prev_stock, double x, double lambda);

struct LogGuarded {
  std::vector<double> values;
  std::vector<bool> floored;
  int floored_count = 0;
};
// ln(max(v, floor)) elementwise.
LogGuarded LogGuard(std::span<const double> v, double floor);

}  // namespace gpmmm::transforms

#endif  // GPMMM_TRANSFORMS_HPP_
