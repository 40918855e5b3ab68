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

// Covariance functions for the GP marketing-mix models. All kernel math in
// the library goes through this header.

#ifndef GPMMM_KERNELS_HPP_
#define GPMMM_KERNELS_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace gpmmm::kernels {

// Squared exponential: eta^2 exp(-(z - z')^2 / (2 rho^2)).
struct SEHyper {
  double eta = 1.0;
  double rho = 1.0;
};

// Periodic: eta^2 exp(-2 sin^2(pi |z - z'| / cycle) / rho^2).
struct PeriodicHyper {
  double eta = 1.0;
  double rho = 1.0;
  double cycle = 12.0;
};

// SE trend plus periodic season over the same (time) input.
struct TrendSeason {
  SEHyper trend;
  PeriodicHyper season;
};

// Spend (or any per-period scale) series indexed by integer period.
class ScaleSeries {
 public:
  ScaleSeries() = default;
  ScaleSeries(int first_period, std::vector<double> values)
      : first_period_(first_period), values_(std::move(values)) {}

  // Throws DomainError when the period is not covered.
  double At(double period) const;
  bool Covers(double period) const;
  int first_period() const { return first_period_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int first_period_ = 0;
  std::vector<double> values_;
};

// scale(t) scale(t') k_SE(t, t'): the covariance of beta(t) x_t when beta is a
// GP over time. The series is held by reference; prediction periods that are
// not in it need a caller-supplied scale (see Cross).
struct ScaledTime {
  SEHyper se;
  std::shared_ptr<const ScaleSeries> scale;
};

struct Kernel;

struct Sum {
  std::vector<Kernel> terms;
};

struct Kernel {
  std::variant<SEHyper, PeriodicHyper, TrendSeason, ScaledTime, Sum> variant;

  static Kernel SE(double eta, double rho) { return {SEHyper{eta, rho}}; }
  static Kernel Periodic(double eta, double rho, double cycle) {
    return {PeriodicHyper{eta, rho, cycle}};
  }
  static Kernel MakeTrendSeason(SEHyper trend, PeriodicHyper season) {
    return {TrendSeason{trend, season}};
  }
  static Kernel MakeScaledTime(SEHyper se, std::shared_ptr<const ScaleSeries> s) {
    return {ScaledTime{se, std::move(s)}};
  }
  static Kernel MakeSum(std::vector<Kernel> terms) { return {Sum{std::move(terms)}}; }
};

// Human-readable summary, used in error messages.
std::string Describe(const Kernel& kernel);

// Throws DomainError when any hyperparameter violates its invariant.
void Validate(const Kernel& kernel);

double Evaluate(const Kernel& kernel, double z, double z2);

// Prior variance k(z, z) with an optional scale override for ScaledTime.
double Variance(const Kernel& kernel, double z,
                std::optional<double> scale_override = std::nullopt);

// T x T Gram matrix plus `jitter` on the diagonal.
Eigen::MatrixXd Gram(const Kernel& kernel, std::span<const double> inputs,
                     double jitter = 0.0);

// Entry (i, j) = k(a_i, b_j). For ScaledTime kernels `row_scale` replaces the
// series lookup for the rows (prediction-time spend); columns always use the
// stored series.
Eigen::MatrixXd Cross(const Kernel& kernel, std::span<const double> a,
                      std::span<const double> b,
                      std::optional<std::span<const double>> row_scale = std::nullopt);

// Jitter-escalating Cholesky: tries (K + j I) with j = 0 (if allow_zero), then
// 1e-8, 1e-7, ..., 1e-2 times the mean diagonal.
struct Factor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};
Factor StableCholesky(const Eigen::MatrixXd& matrix, bool allow_zero,
                      const std::string& what = "kernel");

}  // namespace gpmmm::kernels

#endif  // GPMMM_KERNELS_HPP_
