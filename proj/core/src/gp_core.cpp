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

#include "gpmmm/gp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gpmmm/error.hpp"
#include "gpmmm/random.hpp"

namespace gpmmm::gp {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double SampleSd(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 1.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace

GpPosterior::GpPosterior(const Eigen::MatrixXd& prior_cov, double sigma, Eigen::VectorXd targets,
                         Eigen::MatrixXd basis)
    : targets_(std::move(targets)), basis_(std::move(basis)), sigma_(sigma) {
  const Eigen::Index n = targets_.size();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("noise sd must be positive");
  if (prior_cov.rows() != n || prior_cov.cols() != n)
    throw DomainError("prior covariance does not match the number of targets");
  if (basis_.size() == 0) basis_.resize(n, 0);
  if (basis_.rows() != n) throw DomainError("basis rows do not match the number of targets");

  Eigen::MatrixXd a = prior_cov;
  a.diagonal().array() += sigma * sigma;
  kernels::Factor f = kernels::StableCholesky(a, /*allow_zero=*/true, "K + sigma^2 I");
  lower_ = std::move(f.lower);
  jitter_ = f.jitter;
  const auto l = lower_.triangularView<Eigen::Lower>();

  Eigen::VectorXd resid = targets_;
  coefficients_.resize(basis_.cols());
  if (basis_.cols() > 0) {
    solved_basis_ = lower_.transpose().triangularView<Eigen::Upper>().solve(l.solve(basis_));
    gls_.compute(basis_.transpose() * solved_basis_);
    if (gls_.info() != Eigen::Success)
      throw FactorizationError("fixed-effect basis is rank deficient under the GP covariance");
    coefficients_ = gls_.solve(solved_basis_.transpose() * targets_);
    resid -= basis_ * coefficients_;
  }
  const Eigen::VectorXd half = l.solve(resid);
  weights_ = lower_.transpose().triangularView<Eigen::Upper>().solve(half);
  lml_ = -0.5 * half.squaredNorm() - lower_.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * kLog2Pi;
}

GpPosterior GpPosterior::FromKernel(const kernels::Kernel& kernel, std::vector<double> inputs,
                                    Eigen::VectorXd targets, double sigma) {
  GpPosterior gp(kernels::Gram(kernel, inputs), sigma, std::move(targets));
  gp.kernel_ = kernel;
  gp.inputs_ = std::move(inputs);
  return gp;
}

Eigen::VectorXd GpPosterior::PredictMean(const Eigen::MatrixXd& cross,
                                         const Eigen::MatrixXd& test_basis) const {
  Eigen::VectorXd mean = cross * weights_;
  if (basis_.cols() > 0) {
    if (test_basis.rows() != cross.rows() || test_basis.cols() != basis_.cols())
      throw DomainError("test basis shape does not match the training basis");
    mean += test_basis * coefficients_;
  }
  return mean;
}

Eigen::MatrixXd GpPosterior::PredictCovariance(const Eigen::MatrixXd& cross,
                                              const Eigen::MatrixXd& prior_cov,
                                              const Eigen::MatrixXd& test_basis) const {
  if (cross.cols() != size()) throw DomainError("cross covariance has the wrong column count");
  if (prior_cov.rows() != cross.rows() || prior_cov.cols() != cross.rows())
    throw DomainError("prior covariance shape mismatch");
  const Eigen::MatrixXd v = lower_.triangularView<Eigen::Lower>().solve(cross.transpose());
  Eigen::MatrixXd cov = prior_cov - v.transpose() * v;
  if (basis_.cols() > 0) {
    if (test_basis.rows() != cross.rows() || test_basis.cols() != basis_.cols())
      throw DomainError("test basis shape does not match the training basis");
    const Eigen::MatrixXd r = test_basis.transpose() - solved_basis_.transpose() * cross.transpose();
    cov += r.transpose() * gls_.solve(r);
  }
  return 0.5 * (cov + cov.transpose());
}

PredictiveMoments GpPosterior::Predict(const Eigen::MatrixXd& cross,
                                       const Eigen::VectorXd& prior_var,
                                       const Eigen::MatrixXd& test_basis) const {
  if (cross.cols() != size()) throw DomainError("cross covariance has the wrong column count");
  if (prior_var.size() != cross.rows()) throw DomainError("prior variance length mismatch");
  PredictiveMoments out;
  out.mean = PredictMean(cross, test_basis);
  const auto l = lower_.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd v = l.solve(cross.transpose());
  out.variance = prior_var - v.colwise().squaredNorm().transpose();
  if (basis_.cols() > 0) {
    // Uncertainty in the profiled coefficients.
    const Eigen::MatrixXd r = test_basis.transpose() - solved_basis_.transpose() * cross.transpose();
    const Eigen::MatrixXd s = gls_.solve(r);
    out.variance += (r.array() * s.array()).colwise().sum().transpose().matrix();
  }
  out.variance = out.variance.cwiseMax(0.0);
  out.noisy_variance = out.variance.array() + sigma_ * sigma_;
  return out;
}

Eigen::VectorXd SamplePrior(const kernels::Kernel& kernel, std::span<const double> inputs,
                            std::uint64_t seed) {
  const Eigen::MatrixXd g = kernels::Gram(kernel, inputs);
  const kernels::Factor f = kernels::StableCholesky(g, /*allow_zero=*/false, kernels::Describe(kernel));
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd u(static_cast<Eigen::Index>(inputs.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
  return f.lower.triangularView<Eigen::Lower>() * u;
}

PredictiveMoments PosteriorPredict(const GpPosterior& gp, std::span<const double> test_inputs,
                                   std::optional<std::span<const double>> scale_override) {
  if (!gp.kernel()) throw DomainError("posterior was not built from a kernel");
  const kernels::Kernel& k = *gp.kernel();
  const Eigen::MatrixXd cross = kernels::Cross(k, test_inputs, gp.inputs(), scale_override);
  Eigen::VectorXd prior_var(static_cast<Eigen::Index>(test_inputs.size()));
  for (std::size_t i = 0; i < test_inputs.size(); ++i) {
    std::optional<double> s;
    if (scale_override) s = (*scale_override)[i];
    prior_var(static_cast<Eigen::Index>(i)) = kernels::Variance(k, test_inputs[i], s);
  }
  return gp.Predict(cross, prior_var);
}

double FamilyLogLikelihood(const HyperFamily& family, std::span<const double> values) {
  const std::size_t n = family.params.size();
  if (values.size() != n) throw DomainError("hyperparameter vector has the wrong length");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) return -std::numeric_limits<double>::infinity();
  try {
    const Eigen::MatrixXd k = family.covariance(values.first(n - 1));
    const GpPosterior gp(k, values[n - 1], family.targets, family.basis);
    return gp.log_marginal_likelihood();
  } catch (const FactorizationError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

HyperFamily SEFamily(std::span<const double> inputs, const Eigen::VectorXd& targets) {
  if (inputs.size() != static_cast<std::size_t>(targets.size()))
    throw DomainError("inputs and targets differ in length");
  const auto [lo, hi] = std::minmax_element(inputs.begin(), inputs.end());
  double range = inputs.empty() ? 1.0 : *hi - *lo;
  if (!(range > 0.0)) range = 1.0;
  double sd = SampleSd(targets);
  if (!(sd > 0.0)) sd = 1.0;
  HyperFamily fam;
  fam.params = {
      {"eta", 1e-3 * sd, 1e3 * sd, sd, 1.0},
      {"rho", 1e-2 * range, 1e1 * range, 0.25 * range, 1.0},
      {"sigma", 1e-4 * sd, 1e1 * sd, 0.25 * sd, 1.0},
  };
  std::vector<double> x(inputs.begin(), inputs.end());
  fam.covariance = [x = std::move(x)](std::span<const double> v) {
    return kernels::Gram(kernels::Kernel::SE(v[0], v[1]), x);
  };
  fam.targets = targets;
  return fam;
}

PointFit FitPoint(const HyperFamily& family, int restarts, std::uint64_t seed,
                  const SimplexOptions& options) {
  const std::size_t n = family.params.size();
  if (family.targets.size() < 3) throw DomainError("point fit needs at least 3 observations");
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  std::vector<double> lo(n), hi(n), median(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = std::log(family.params[i].lower);
    hi[i] = std::log(family.params[i].upper);
    median[i] = std::clamp(std::log(family.params[i].prior_median), lo[i], hi[i]);
  }
  std::vector<double> natural(n);
  auto objective = [&](std::span<const double> u) {
    for (std::size_t i = 0; i < n; ++i) natural[i] = std::exp(u[i]);
    return -FamilyLogLikelihood(family, natural);
  };

  PointFit best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> start = median;
    if (r > 0) {
      Rng rng = MakeRng(DeriveSeed(seed, {static_cast<std::uint64_t>(r)}));
      for (std::size_t i = 0; i < n; ++i)
        start[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    }
    const SimplexResult res = MinimizeSimplex(objective, start, lo, hi, options);
    if (!std::isfinite(res.value)) {
      ++best.failed_restarts;
      continue;
    }
    if (-res.value > best.log_likelihood) {
      best.log_likelihood = -res.value;
      best.values.resize(n);
      for (std::size_t i = 0; i < n; ++i) best.values[i] = std::exp(res.x[i]);
    }
  }
  if (best.values.empty())
    throw FitError("every restart failed to factorize the covariance");
  return best;
}

HyperDraws FitMetropolis(const std::vector<HyperParameter>& params,
                         const std::function<double(std::span<const double>)>& log_likelihood,
                         const MetropolisSettings& settings, std::uint64_t seed,
                         std::optional<std::vector<double>> start) {
  if (!(settings.chain_length > settings.burn_in) || settings.burn_in < 0)
    throw DomainError("chain length must exceed burn-in");
  if (settings.thin < 1) throw DomainError("thinning must be at least 1");
  const std::size_t n = params.size();
  std::vector<double> mu(n), sd(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = std::log(params[i].prior_median);
    sd[i] = params[i].prior_log_sd;
  }
  std::vector<double> natural(n);
  auto target = [&](const std::vector<double>& u) {
    double lp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (u[i] - mu[i]) / sd[i];
      lp -= 0.5 * z * z;
      natural[i] = std::exp(u[i]);
    }
    const double ll = log_likelihood(natural);
    return std::isfinite(ll) ? ll + lp : -std::numeric_limits<double>::infinity();
  };

  std::vector<double> current(n);
  if (start) {
    if (start->size() != n) throw DomainError("Metropolis start has the wrong length");
    for (std::size_t i = 0; i < n; ++i) current[i] = std::log((*start)[i]);
  } else {
    current = mu;
  }
  double current_lp = target(current);
  if (!std::isfinite(current_lp)) throw SamplerError("Metropolis start has zero posterior density");

  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  double log_scale = std::log(settings.initial_scale);
  int accepted_total = 0, accepted_kept = 0, proposals_kept = 0;
  HyperDraws out;
  out.provenance = HyperDraws::Provenance::kMetropolis;
  std::vector<double> proposal(n);
  for (int it = 0; it < settings.chain_length; ++it) {
    const double scale = std::exp(log_scale);
    for (std::size_t i = 0; i < n; ++i) proposal[i] = current[i] + scale * normal(rng);
    const double lp = target(proposal);
    const double log_u = std::log(unif(rng));
    const bool accept = std::isfinite(lp) && log_u < lp - current_lp;
    if (accept) {
      current = proposal;
      current_lp = lp;
      ++accepted_total;
    }
    if (it < settings.burn_in) {
      const double step = 1.0 / std::pow(1.0 + it, 0.6);
      log_scale += step * ((accept ? 1.0 : 0.0) - settings.target_acceptance);
      log_scale = std::clamp(log_scale, std::log(1e-4), std::log(10.0));
    } else {
      ++proposals_kept;
      if (accept) ++accepted_kept;
      if ((it - settings.burn_in) % settings.thin == 0) {
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = std::exp(current[i]);
        out.draws.push_back(std::move(d));
      }
    }
  }
  if (accepted_total == 0) {
    std::ostringstream os;
    os << "Metropolis accepted no proposals in " << settings.chain_length
       << " iterations (final proposal scale " << std::exp(log_scale) << ", start log density "
       << current_lp << ")";
    throw SamplerError(os.str());
  }
  out.acceptance_rate =
      proposals_kept > 0 ? static_cast<double>(accepted_kept) / proposals_kept : 0.0;
  out.proposal_scale = std::exp(log_scale);
  return out;
}

HyperDraws FitMetropolis(const HyperFamily& family, const MetropolisSettings& settings,
                         std::uint64_t seed) {
  std::vector<double> start(family.params.size());
  for (std::size_t i = 0; i < start.size(); ++i) start[i] = family.params[i].prior_median;
  return FitMetropolis(
      family.params,
      [&family](std::span<const double> v) { return FamilyLogLikelihood(family, v); }, settings,
      seed, start);
}

}  // namespace gpmmm::gp
