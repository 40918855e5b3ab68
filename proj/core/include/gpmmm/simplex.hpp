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

#ifndef GPMMM_SIMPLEX_HPP_
#define GPMMM_SIMPLEX_HPP_

#include <functional>
#include <span>
#include <vector>

namespace gpmmm {

struct SimplexOptions {
  int max_evaluations = 600;
  double initial_step = 0.5;
  // Stop when the spread of function values over the simplex drops below
  // f_tolerance and the simplex diameter below x_tolerance.
  double f_tolerance = 1e-9;
  double x_tolerance = 1e-4;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead minimization inside the box [lower, upper]. Vertices are clamped
// to the box after every move. Non-finite objective values are treated as
// +infinity so the simplex walks away from them.
SimplexResult MinimizeSimplex(const std::function<double(std::span<const double>)>& objective,
                              std::vector<double> start, std::span<const double> lower,
                              std::span<const double> upper, const SimplexOptions& options = {});

}  // namespace gpmmm

#endif  // GPMMM_SIMPLEX_HPP_
