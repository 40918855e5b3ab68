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

#include "gpmmm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gpmmm/error.hpp"

namespace gpmmm {

SimplexResult MinimizeSimplex(const std::function<double(std::span<const double>)>& objective,
                              std::vector<double> start, std::span<const double> lower,
                              std::span<const double> upper, const SimplexOptions& options) {
  const std::size_t n = start.size();
  if (n == 0 || lower.size() != n || upper.size() != n)
    throw DomainError("simplex: dimension mismatch between start and bounds");

  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  clamp(start);
  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) {
    double step = options.initial_step;
    // Step inward when the start sits on the upper bound.
    if (pts[i + 1][i] + step > upper[i]) step = -step;
    pts[i + 1][i] += step;
    clamp(pts[i + 1]);
  }
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;

  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t d = 0; d < n; ++d)
        diameter = std::max(diameter, std::abs(pts[i][d] - pts[best][d]));
    const double spread = f[worst] - f[best];
    if ((std::isfinite(spread) && spread <= options.f_tolerance) &&
        diameter <= options.x_tolerance) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
    }
    auto along = [&](double coef, std::vector<double>& out) {
      for (std::size_t d = 0; d < n; ++d) out[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
      clamp(out);
    };

    along(-1.0, trial);
    const double fr = eval(trial);
    if (fr < f[best]) {
      along(-2.0, trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        f[worst] = fe;
      } else {
        pts[worst] = trial;
        f[worst] = fr;
      }
      continue;
    }
    if (fr < f[second]) {
      pts[worst] = trial;
      f[worst] = fr;
      continue;
    }
    const bool outside = fr < f[worst];
    along(outside ? -0.5 : 0.5, trial2);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : f[worst])) {
      pts[worst] = trial2;
      f[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
      f[i] = eval(pts[i]);
    }
  }

  const auto best_it = std::min_element(f.begin(), f.end());
  const auto b = static_cast<std::size_t>(best_it - f.begin());
  return {pts[b], f[b], evals, converged};
}

}  // namespace gpmmm
