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
#include <numbers>
#include <sstream>

#include "gpmmm/error.hpp"

namespace gpmmm::kernels {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckFinite(double z) {
  if (!std::isfinite(z)) throw DomainError("kernel input is not finite");
}

double EvalSE(const SEHyper& h, double z, double z2) {
  const double d = (z - z2) / h.rho;
  return h.eta * h.eta * std::exp(-0.5 * d * d);
}

double EvalPeriodic(const PeriodicHyper& h, double z, double z2) {
  const double s = std::sin(std::numbers::pi * std::abs(z - z2) / h.cycle);
  return h.eta * h.eta * std::exp(-2.0 * s * s / (h.rho * h.rho));
}

double EvalImpl(const Kernel& k, double z, double z2, std::optional<double> row_scale) {
  return std::visit(
      Overloaded{
          [&](const SEHyper& h) { return EvalSE(h, z, z2); },
          [&](const PeriodicHyper& h) { return EvalPeriodic(h, z, z2); },
          [&](const TrendSeason& h) {
            return EvalSE(h.trend, z, z2) + EvalPeriodic(h.season, z, z2);
          },
          [&](const ScaledTime& h) {
            if (!h.scale) throw DomainError("ScaledTime kernel has no scale series");
            const double a = row_scale ? *row_scale : h.scale->At(z);
            return a * h.scale->At(z2) * EvalSE(h.se, z, z2);
          },
          [&](const Sum& s) {
            double total = 0.0;
            for (const Kernel& t : s.terms) total += EvalImpl(t, z, z2, row_scale);
            return total;
          }},
      k.variant);
}

bool HasScaledTime(const Kernel& k) {
  return std::visit(Overloaded{[](const ScaledTime&) { return true; },
                               [](const Sum& s) {
                                 for (const Kernel& t : s.terms)
                                   if (HasScaledTime(t)) return true;
                                 return false;
                               },
                               [](const auto&) { return false; }},
                    k.variant);
}

}  // namespace

double ScaleSeries::At(double period) const {
  if (!Covers(period)) {
    std::ostringstream os;
    os << "no scale value for period " << period << " (series covers "
       << first_period_ << ".." << first_period_ + static_cast<int>(values_.size()) - 1
       << ")";
    throw DomainError(os.str());
  }
  return values_[static_cast<std::size_t>(std::lround(period)) - first_period_];
}

bool ScaleSeries::Covers(double period) const {
  const double r = std::round(period);
  if (r != period) return false;
  const long idx = std::lround(period) - first_period_;
  return idx >= 0 && idx < static_cast<long>(values_.size());
}

std::string Describe(const Kernel& kernel) {
  std::ostringstream os;
  std::visit(Overloaded{[&](const SEHyper& h) {
                          os << "SE(eta=" << h.eta << ", rho=" << h.rho << ")";
                        },
                        [&](const PeriodicHyper& h) {
                          os << "Periodic(eta=" << h.eta << ", rho=" << h.rho
                             << ", cycle=" << h.cycle << ")";
                        },
                        [&](const TrendSeason& h) {
                          os << "TrendSeason(" << Describe(Kernel{h.trend}) << " + "
                             << Describe(Kernel{h.season}) << ")";
                        },
                        [&](const ScaledTime& h) {
                          os << "ScaledTime(" << Describe(Kernel{h.se}) << ")";
                        },
                        [&](const Sum& s) {
                          os << "Sum(";
                          for (std::size_t i = 0; i < s.terms.size(); ++i)
                            os << (i ? ", " : "") << Describe(s.terms[i]);
                          os << ")";
                        }},
             kernel.variant);
  return os.str();
}

void Validate(const Kernel& kernel) {
  auto se = [](const SEHyper& h) {
    if (!(h.eta > 0.0) || !(h.rho > 0.0) || !std::isfinite(h.eta) || !std::isfinite(h.rho))
      throw DomainError("SE hyperparameters must be positive and finite");
  };
  auto per = [](const PeriodicHyper& h) {
    if (!(h.eta > 0.0) || !(h.rho > 0.0) || !(h.cycle > 0.0))
      throw DomainError("periodic hyperparameters must be positive");
  };
  std::visit(Overloaded{se, per,
                        [&](const TrendSeason& h) {
                          se(h.trend);
                          per(h.season);
                        },
                        [&](const ScaledTime& h) {
                          se(h.se);
                          if (!h.scale) throw DomainError("ScaledTime kernel has no scale series");
                        },
                        [&](const Sum& s) {
                          if (s.terms.empty()) throw DomainError("empty Sum kernel");
                          for (const Kernel& t : s.terms) Validate(t);
                        }},
             kernel.variant);
}

double Evaluate(const Kernel& kernel, double z, double z2) {
  Validate(kernel);
  CheckFinite(z);
  CheckFinite(z2);
  return EvalImpl(kernel, z, z2, std::nullopt);
}

double Variance(const Kernel& kernel, double z, std::optional<double> scale_override) {
  Validate(kernel);
  CheckFinite(z);
  if (!scale_override) return EvalImpl(kernel, z, z, std::nullopt);
  // Both sides of k(z, z) take the override.
  return std::visit(
      Overloaded{[&](const ScaledTime& h) {
                   return *scale_override * *scale_override * h.se.eta * h.se.eta;
                 },
                 [&](const Sum& s) {
                   double total = 0.0;
                   for (const Kernel& t : s.terms) total += Variance(t, z, scale_override);
                   return total;
                 },
                 [&](const auto&) { return EvalImpl(kernel, z, z, std::nullopt); }},
      kernel.variant);
}

Eigen::MatrixXd Gram(const Kernel& kernel, std::span<const double> inputs, double jitter) {
  if (jitter < 0.0) throw DomainError("jitter must be nonnegative");
  Validate(kernel);
  for (double z : inputs) CheckFinite(z);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = EvalImpl(kernel, inputs[i], inputs[j], std::nullopt);
      g(i, j) = v;
      g(j, i) = v;
    }
    g(i, i) += jitter;
  }
  return g;
}

Eigen::MatrixXd Cross(const Kernel& kernel, std::span<const double> a,
                      std::span<const double> b,
                      std::optional<std::span<const double>> row_scale) {
  Validate(kernel);
  for (double z : a) CheckFinite(z);
  for (double z : b) CheckFinite(z);
  if (row_scale && row_scale->size() != a.size())
    throw DomainError("row scale length does not match the number of rows");
  if (row_scale && !HasScaledTime(kernel)) row_scale.reset();
  Eigen::MatrixXd c(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::optional<double> s;
    if (row_scale) s = (*row_scale)[i];
    for (std::size_t j = 0; j < b.size(); ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = EvalImpl(kernel, a[i], b[j], s);
  }
  return c;
}

Factor StableCholesky(const Eigen::MatrixXd& matrix, bool allow_zero, const std::string& what) {
  const Eigen::Index n = matrix.rows();
  double mean_diag = n > 0 ? matrix.diagonal().mean() : 1.0;
  if (!(mean_diag > 0.0) || !std::isfinite(mean_diag)) mean_diag = 1.0;
  Eigen::MatrixXd work = matrix;
  Eigen::LLT<Eigen::MatrixXd> llt;
  auto attempt = [&](double jitter) -> bool {
    work = matrix;
    work.diagonal().array() += jitter;
    llt.compute(work);
    return llt.info() == Eigen::Success;
  };
  if (allow_zero && attempt(0.0)) return {llt.matrixL(), 0.0};
  for (double rel = 1e-8; rel <= 1e-2 * 1.0000001; rel *= 10.0) {
    if (attempt(rel * mean_diag)) return {llt.matrixL(), rel * mean_diag};
  }
  // Eigenvalue range stands in for a condition estimate in the message.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
  std::ostringstream os;
  os << "Cholesky failed for " << what << " (n=" << n << ") after jitter up to 1e-2 x mean diagonal;"
     << " eigenvalue range [" << es.eigenvalues().minCoeff() << ", " << es.eigenvalues().maxCoeff()
     << "]";
  throw FactorizationError(os.str());
}

}  // namespace gpmmm::kernels
