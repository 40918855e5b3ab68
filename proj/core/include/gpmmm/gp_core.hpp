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

// Exact GP regression: prior sampling, conjugate posterior prediction, the
// log marginal likelihood and hyperparameter inference (simplex point
// estimates or adaptive random-walk Metropolis draws).

#ifndef GPMMM_GP_CORE_HPP_
#define GPMMM_GP_CORE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpmmm/kernels.hpp"
#include "gpmmm/simplex.hpp"

namespace gpmmm::gp {

struct PredictiveMoments {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;        // latent function, floored at 0
  Eigen::VectorXd noisy_variance;  // variance + sigma^2
};

// Factorized posterior of y = H b + f + e, f ~ GP(0, K), e ~ N(0, sigma^2 I).
// The fixed-effect coefficients b (constant intercept, dummies) are profiled
// out by generalized least squares; pass an empty basis for a zero-mean GP.
class GpPosterior {
 public:
  GpPosterior(const Eigen::MatrixXd& prior_cov, double sigma, Eigen::VectorXd targets,
              Eigen::MatrixXd basis = Eigen::MatrixXd());

  // Single-kernel convenience; keeps the kernel and inputs for PosteriorPredict.
  static GpPosterior FromKernel(const kernels::Kernel& kernel, std::vector<double> inputs,
                                Eigen::VectorXd targets, double sigma);

  // cross: M x T prior covariance between test and training points;
  // prior_var: the M prior variances at the test points; test_basis: M x p.
  PredictiveMoments Predict(const Eigen::MatrixXd& cross, const Eigen::VectorXd& prior_var,
                            const Eigen::MatrixXd& test_basis = Eigen::MatrixXd()) const;

  // Joint latent covariance at the test points; prior_cov is M x M.
  Eigen::MatrixXd PredictCovariance(const Eigen::MatrixXd& cross, const Eigen::MatrixXd& prior_cov,
                                    const Eigen::MatrixXd& test_basis = Eigen::MatrixXd()) const;

  // Mean only; cheaper when variances are not needed.
  Eigen::VectorXd PredictMean(const Eigen::MatrixXd& cross,
                              const Eigen::MatrixXd& test_basis = Eigen::MatrixXd()) const;

  double log_marginal_likelihood() const { return lml_; }
  double sigma() const { return sigma_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return targets_.size(); }
  const Eigen::VectorXd& targets() const { return targets_; }
  // (K + sigma^2 I)^-1 (y - H b)
  const Eigen::VectorXd& weights() const { return weights_; }
  // GLS estimate of b (empty without a basis).
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const Eigen::MatrixXd& lower() const { return lower_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  const std::optional<kernels::Kernel>& kernel() const { return kernel_; }
  const std::vector<double>& inputs() const { return inputs_; }

 private:
  Eigen::VectorXd targets_;
  Eigen::MatrixXd basis_;
  double sigma_;
  double jitter_ = 0.0;
  Eigen::MatrixXd lower_;
  Eigen::MatrixXd solved_basis_;        // A^-1 H
  Eigen::LLT<Eigen::MatrixXd> gls_;     // H^T A^-1 H
  Eigen::VectorXd coefficients_;
  Eigen::VectorXd weights_;
  double lml_ = 0.0;
  std::optional<kernels::Kernel> kernel_;
  std::vector<double> inputs_;
};

// L u with L the jittered Cholesky factor of the Gram matrix and u standard
// normal from a generator seeded with `seed`.
Eigen::VectorXd SamplePrior(const kernels::Kernel& kernel, std::span<const double> inputs,
                            std::uint64_t seed);

PredictiveMoments PosteriorPredict(
    const GpPosterior& gp, std::span<const double> test_inputs,
    std::optional<std::span<const double>> scale_override = std::nullopt);

inline double LogMarginalLikelihood(const GpPosterior& gp) { return gp.log_marginal_likelihood(); }

// One positive hyperparameter: box bounds for point fitting and a log-normal
// prior (median, log-sd) for Metropolis.
struct HyperParameter {
  std::string name;
  double lower = 1e-3;
  double upper = 1e3;
  double prior_median = 1.0;
  double prior_log_sd = 1.0;
};

// A parametric covariance family over fixed training data. The last entry of
// `params` is always the noise sd; `covariance` receives the others.
struct HyperFamily {
  std::vector<HyperParameter> params;
  std::function<Eigen::MatrixXd(std::span<const double>)> covariance;
  Eigen::VectorXd targets;
  Eigen::MatrixXd basis;
};

// LML at natural-scale parameters; -inf when factorization fails.
double FamilyLogLikelihood(const HyperFamily& family, std::span<const double> values);

// SE kernel on scalar inputs with the data-scaled default bounds and priors.
HyperFamily SEFamily(std::span<const double> inputs, const Eigen::VectorXd& targets);

struct PointFit {
  std::vector<double> values;  // natural scale, sigma last
  double log_likelihood = 0.0;
  int failed_restarts = 0;
};

// Maximizes the LML over log hyperparameters. Restart 0 starts from the prior
// medians, later restarts from seeded log-uniform points inside the bounds.
PointFit FitPoint(const HyperFamily& family, int restarts, std::uint64_t seed,
                  const SimplexOptions& options = {});

struct MetropolisSettings {
  int chain_length = 3000;
  int burn_in = 1000;
  int thin = 20;
  double target_acceptance = 0.3;
  double initial_scale = 0.3;
};

struct HyperDraws {
  enum class Provenance { kPointEstimate, kMetropolis };
  std::vector<std::vector<double>> draws;  // natural scale, equal weights
  Provenance provenance = Provenance::kPointEstimate;
  double acceptance_rate = 1.0;
  double proposal_scale = 0.0;
};

// Adaptive random-walk Metropolis over log hyperparameters targeting
// log_likelihood(natural values) + independent log-normal log-priors. The
// proposal scale adapts toward the target acceptance during burn-in and is
// frozen afterward. Throws SamplerError if no proposal is ever accepted.
HyperDraws FitMetropolis(const std::vector<HyperParameter>& params,
                         const std::function<double(std::span<const double>)>& log_likelihood,
                         const MetropolisSettings& settings, std::uint64_t seed,
                         std::optional<std::vector<double>> start = std::nullopt);

HyperDraws FitMetropolis(const HyperFamily& family, const MetropolisSettings& settings,
                         std::uint64_t seed);

}  // namespace gpmmm::gp

#endif  // GPMMM_GP_CORE_HPP_
