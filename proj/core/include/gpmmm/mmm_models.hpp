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

// The focal marketing-mix estimators:
//   NonlinearGP      y = a + sum_j f_j(x_jt) + e,     f_j ~ GP(0, SE over spend)
//   TimeVaryingGP    y = a + sum_j beta_j(t) x_jt + e, beta_j ~ GP(0, SE over time)
//   LogTimeVarying   the time-varying model on log spend and log outcome
//   HillParametric   y = a + A hill(x; k, s) + e, least squares
// The intercept is a constant, absent, or constant plus a trend-season GP.
// Dummy columns and the constant are fixed effects profiled by GLS.

#ifndef GPMMM_MMM_MODELS_HPP_
#define GPMMM_MMM_MODELS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpmmm/dataset.hpp"
#include "gpmmm/gp_core.hpp"
#include "gpmmm/transforms.hpp"

namespace gpmmm::mmm {

enum class ModelKind { kNonlinearGP, kTimeVaryingGP, kHillParametric, kLogTimeVarying };
enum class InterceptKind { kNone, kConstant, kTrendSeason };
enum class InferenceMode { kPoint, kMetropolis };

const char* ToString(ModelKind kind);
ModelKind ModelKindFromString(const std::string& s);
const char* ToString(InterceptKind kind);
InterceptKind InterceptKindFromString(const std::string& s);

struct InferenceSpec {
  InferenceMode mode = InferenceMode::kPoint;
  int restarts = 3;
  gp::MetropolisSettings chain;
};

struct ModelSpec {
  ModelKind kind = ModelKind::kNonlinearGP;
  InterceptKind intercept = InterceptKind::kConstant;
  double season_cycle = 52.0;
  bool log_inputs = false;
  bool log_outcome = false;
  double log_floor = 1e-6;
  std::optional<transforms::StockSpec> carryover;
  std::vector<std::string> dummies;
  InferenceSpec inference;

  // LogTimeVarying requires both logs; Hill does not take log inputs.
  void Validate() const;
  bool time_varying() const {
    return kind == ModelKind::kTimeVaryingGP || kind == ModelKind::kLogTimeVarying;
  }
};

// Shorthands for the common configurations.
ModelSpec NonlinearSpec();
ModelSpec TimeVaryingSpec();
ModelSpec LogTimeVaryingSpec();
ModelSpec HillSpec();

struct Standardization {
  double location = 0.0;
  double scale = 1.0;
};

struct HillEstimate {
  std::vector<double> coefficients;  // fixed effects (constant, dummies)
  double amplitude = 0.0;
  double k = 1.0;
  double s = 1.0;
  double sigma = 1.0;
  double rss = 0.0;
};

// A trained model. Immutable after Fit/Rebuild.
struct FittedModel {
  ModelSpec spec;
  Dataset data;                  // training data as supplied (pre-carryover)
  std::vector<int> periods;      // usable periods after carryover trimming
  std::vector<std::vector<double>> stock;   // per channel, raw units
  std::vector<std::vector<double>> inputs;  // per channel, transformed + standardized
  std::vector<double> outcome;   // raw outcome at `periods`
  Eigen::VectorXd target;        // transformed + standardized outcome
  Eigen::MatrixXd basis;         // constant + dummies
  std::vector<std::string> basis_names;
  Standardization y_std;
  std::vector<Standardization> x_std;
  std::vector<std::string> param_names;
  gp::HyperDraws hypers;
  std::vector<gp::GpPosterior> posteriors;  // one per draw
  std::optional<HillEstimate> hill;
  std::vector<std::string> notes;

  int last_period() const { return periods.back(); }
  std::size_t num_channels() const { return stock.size(); }
};

// Fits the model: carryover, then log transforms, then standardization, then
// hyperparameter inference per spec.inference. Deterministic given seed.
FittedModel Fit(const Dataset& data, const ModelSpec& spec, std::uint64_t seed);

// Rebuilds the posterior from stored hyperparameters without refitting.
FittedModel Rebuild(const Dataset& data, const ModelSpec& spec, const gp::HyperDraws& hypers,
                    const std::optional<HillEstimate>& hill);

enum class BetaExtrapolation { kGp, kFrozen };

struct PredictOptions {
  BetaExtrapolation beta = BetaExtrapolation::kGp;
  // Dummy values per dummy column at the query points; zeros when empty.
  std::vector<std::vector<double>> dummies;
  // Joint posterior draws of the latent mean at the query points, spread
  // evenly over the hyperparameter draws.
  int latent_draws = 0;
  std::uint64_t draw_seed = 0;
};

struct Prediction {
  std::vector<int> periods;
  Eigen::VectorXd mean;            // modeling scale (log outcome when logged)
  Eigen::VectorXd variance;        // latent, modeling scale
  Eigen::VectorXd noisy_variance;  // plus noise
  Eigen::VectorXd outcome;         // outcome units (exp(mean) when logged)
  std::vector<Eigen::VectorXd> draw_means;  // modeling scale, one per draw
  std::vector<Eigen::VectorXd> latent_draws;  // modeling scale
  std::vector<bool> extrapolated;  // stock outside the training range
};

// Forecast for periods after the training data. `spend[j][h]` is the raw
// spend of channel j at periods[h]; with carryover the periods must continue
// the training periods without gaps and stocks are recomputed from the
// spliced spend history.
Prediction Predict(const FittedModel& model, const std::vector<int>& periods,
                   const std::vector<std::vector<double>>& spend,
                   const PredictOptions& options = {});

// Prediction at arbitrary periods (in-sample allowed) given post-carryover
// stock values `stock[j][q]`.
Prediction PredictAtStock(const FittedModel& model, const std::vector<int>& periods,
                          const std::vector<std::vector<double>>& stock,
                          const PredictOptions& options = {});

// In-sample posterior mean at the training points.
Prediction Fitted(const FittedModel& model);

struct ComponentCurve {
  std::string name;   // channel name or "intercept"
  std::string kind;   // "f" (over spend), "beta" (over time), "intercept"
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> lower;  // pointwise 95% band
  std::vector<double> upper;
};

struct ComponentGrid {
  // Per-channel spend grids for f curves; default 50 points over the training
  // stock range.
  std::vector<std::vector<double>> spend;
  // Periods for beta and intercept curves; default the training periods.
  std::vector<int> periods;
  bool rebase = false;  // shift f curves to start at zero
  int default_points = 50;
};

// Additive decomposition: f_j over spend (nonlinear), beta_j over time
// (time-varying, in outcome-per-input units) and the intercept.
std::vector<ComponentCurve> Components(const FittedModel& model, const ComponentGrid& grid = {});

struct Elasticity {
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// beta_j(period) of a log-log time-varying model. Periods after the training
// data use GP extrapolation or the last training value per `mode`.
Elasticity ElasticityAt(const FittedModel& model, int period, std::size_t channel = 0,
                        BetaExtrapolation mode = BetaExtrapolation::kGp);

// Intercept of the log-log model at `period`: predicted log outcome at unit
// spend on every channel.
double LogLinearIntercept(const FittedModel& model, int period,
                          BetaExtrapolation mode = BetaExtrapolation::kGp);

// Training R^2 of the in-sample posterior mean, on the outcome scale.
double TrainingR2(const FittedModel& model);

}  // namespace gpmmm::mmm

#endif  // GPMMM_MMM_MODELS_HPP_
