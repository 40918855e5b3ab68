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
#include <numeric>

#include "gpmmm/error.hpp"

namespace gpmmm::transforms {
namespace {

// Exact for the small arguments AdStock uses; 0 when k > n.
double Binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace

double Hill(double x, const HillParams& p) {
  if (!(p.k > 0.0) || !(p.s > 0.0)) throw DomainError("Hill parameters must be positive");
  if (x < 0.0 || std::isnan(x)) throw DomainError("Hill input must be nonnegative");
  if (x == 0.0) return 0.0;
  return 1.0 / (1.0 + std::pow(x / p.k, -p.s));
}

void Validate(const StockSpec& spec) {
  if (!(spec.decay >= 0.0 && spec.decay <= 1.0)) throw DomainError("stock decay must lie in [0, 1]");
  if (spec.lags < 0) throw DomainError("stock lags must be nonnegative");
  if (spec.family == StockFamily::kPascal && spec.pascal_shape < 1)
    throw DomainError("Pascal shape must be a positive count");
}

namespace {

// Unnormalized weights and their sum.
std::vector<double> RawWeights(const StockSpec& spec, double& total) {
  Validate(spec);
  std::vector<double> w(static_cast<std::size_t>(spec.lags) + 1);
  for (int l = 0; l <= spec.lags; ++l) {
    if (spec.family == StockFamily::kGeometric) {
      w[l] = l == 0 ? 1.0 : std::pow(spec.decay, l);
    } else {
      const int tau = spec.pascal_shape;
      const double c = spec.convention == BinomialConvention::kPrinted
                           ? Binomial(l + tau - 1, tau)
                           : Binomial(l + tau - 1, l);
      w[l] = (l == 0 ? 1.0 : std::pow(1.0 - spec.decay, l)) * c;
    }
  }
  total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("stock weights are all zero for this specification");
  return w;
}

}  // namespace

std::vector<double> StockWeights(const StockSpec& spec) {
  double total = 0.0;
  std::vector<double> w = RawWeights(spec, total);
  for (double& v : w) v /= total;
  return w;
}

StockSeries Adstock(std::span<const double> x, const StockSpec& spec) {
  double total = 0.0;
  const std::vector<double> w = RawWeights(spec, total);
  const std::size_t lags = static_cast<std::size_t>(spec.lags);
  if (x.size() <= lags) throw DomainError("series is shorter than the AdStock lag window");
  StockSeries out;
  out.offset = spec.lags;
  out.values.resize(x.size() - lags);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const std::size_t t = i + lags;
    double s = 0.0;
    for (std::size_t l = 0; l <= lags; ++l) s += w[l] * x[t - l];
    out.values[i] = s / total;
  }
  return out;
}

double KoyckStep(double prev_stock, double x, double lambda) { return x + lambda * prev_stock; }

LogGuarded LogGuard(std::span<const double> v, double floor) {
  if (!(floor > 0.0)) throw DomainError("log floor must be positive");
  LogGuarded out;
  out.values.resize(v.size());
  out.floored.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool f = !(v[i] >= floor);
    out.floored[i] = f;
    out.floored_count += f ? 1 : 0;
    out.values[i] = std::log(f ? floor : v[i]);
  }
  return out;
}

}  // namespace gpmmm::transforms
