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

// Holdout evaluation, conflation labels, the simulation grid and the
// regression of conflation rates on factor levels.

#ifndef GPMMM_EVALUATION_HPP_
#define GPMMM_EVALUATION_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpmmm/dataset.hpp"
#include "gpmmm/dgp_sim.hpp"
#include "gpmmm/mmm_models.hpp"

namespace gpmmm::eval {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct HoldoutResult {
  std::string model;
  double mse = kNaN;
  double rmse = kNaN;
  // Posterior RMSE draws and their mean and central 95% interval. Without
  // latent draws there is one per hyperparameter draw.
  std::vector<double> rmse_draws;
  double rmse_mean = kNaN;
  double lower = kNaN;
  double upper = kNaN;
  bool valid = false;
  std::string error;
};

double MeanSquaredError(const std::vector<double>& prediction, const std::vector<double>& target);

// Fits `spec` on all but the final `horizon` periods and predicts those under
// the observed spend. Fit or prediction failures give valid = false.
// posterior_draws > 0 computes the RMSE draws from joint latent draws.
HoldoutResult HoldoutEval(const Dataset& data, const mmm::ModelSpec& spec, int horizon,
                          std::uint64_t seed, const std::string& name = "",
                          int posterior_draws = 0);

struct HoldoutPair {
  HoldoutResult first;
  HoldoutResult second;
};
HoldoutPair HoldoutEval(const Dataset& data, const mmm::ModelSpec& first,
                        const mmm::ModelSpec& second, int horizon, std::uint64_t seed);

enum class LabelMode {
  kPoint,     // competing MSE <= true MSE (1 + delta)
  kInterval,  // the competing RMSE interval reaches down to the true upper bound
};

bool ConflationLabel(double true_mse, double competing_mse, double delta = 0.0);
bool IntervalConflationLabel(const HoldoutResult& truth, const HoldoutResult& competing);

// The varied simulation factors and their low / medium / high values.
enum class Factor {
  kAmplitude,
  kSmoothness,
  kHillShape,
  kHillK,
  kArCoef,
  kArSd,
  kNoise,
  kCarryover,
};
inline constexpr int kNumFactors = 8;
inline constexpr std::array<Factor, kNumFactors> kAllFactors = {
    Factor::kAmplitude, Factor::kSmoothness, Factor::kHillShape, Factor::kHillK,
    Factor::kArCoef,    Factor::kArSd,       Factor::kNoise,     Factor::kCarryover};

const char* ToString(Factor f);
Factor FactorFromString(const std::string& s);
const std::array<double, 3>& FactorValues(Factor f);
const char* LevelName(int level);

// The six factors varied for a DGP family.
std::vector<Factor> FactorsFor(sim::DgpKind kind);

struct SimulationSetting {
  int id = 0;
  sim::DgpKind dgp = sim::DgpKind::kNonlinearGP;
  std::array<int, kNumFactors> level{};  // 0 low, 1 medium, 2 high
  std::array<std::optional<double>, kNumFactors> value_override{};
  int replicates = 20;
  int periods = 100;
  int holdout = 10;
  // Stationary mean of the AR(1) spend and its start. Unset: 0 (unclamped,
  // signed spend) for the GP DGPs and kHillSpendLevel (clamped at 0) for Hill.
  std::optional<double> spend_level;

  int Level(Factor f) const { return level[static_cast<std::size_t>(f)]; }
  void SetLevel(Factor f, int l) { level[static_cast<std::size_t>(f)] = l; }
  double Value(Factor f) const;
  std::string Label() const;
};

inline constexpr double kHillSpendLevel = 50.0;

// All factors at the medium level.
SimulationSetting MidSetting(sim::DgpKind kind, int id = 0);

// 3^6 settings per DGP family in the order nonlinear, time-varying, Hill,
// factor levels enumerated with the first factor varying slowest.
std::vector<SimulationSetting> FullGrid(int replicates = 20, int periods = 100, int holdout = 10);

// Spend process and DGP of a setting. Spend is AR(1) around a level of 50.
sim::SpendingSpec SettingSpending(const SimulationSetting& s);
sim::DgpSpec SettingDgp(const SimulationSetting& s);

// The model matching the DGP and the competing one.
mmm::ModelSpec TrueModelFor(sim::DgpKind kind);
mmm::ModelSpec CompetingModelFor(sim::DgpKind kind);

struct ConflationRecord {
  int setting_id = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double true_mse = kNaN;
  double competing_mse = kNaN;
  double true_lower = kNaN, true_upper = kNaN;
  double competing_lower = kNaN, competing_upper = kNaN;
  bool conflated = false;
  bool valid = false;
  std::string error;
};

struct SettingRate {
  int setting_id = 0;
  int valid = 0;
  int invalid = 0;
  int conflated = 0;
  std::optional<double> rate;  // share of valid replicates, missing if none valid
  std::string diagnostics;
};

struct MegasimOptions {
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0: hardware concurrency
  LabelMode mode = LabelMode::kPoint;
  double delta = 0.0;
  int posterior_draws = 200;  // interval mode only
  mmm::InferenceSpec inference;
};

struct MegasimResult {
  std::vector<ConflationRecord> records;  // ordered by (setting, replicate)
  std::vector<SettingRate> rates;         // ordered as the grid
};

// One replicate: generate, fit both models, label.
ConflationRecord RunReplicate(const SimulationSetting& s, int replicate, const MegasimOptions& options);

MegasimResult Megasim(const std::vector<SimulationSetting>& grid, const MegasimOptions& options);

std::vector<SettingRate> AggregateRates(const std::vector<SimulationSetting>& grid,
                                        const std::vector<ConflationRecord>& records);

struct AnyMajor {
  sim::DgpKind dgp;
  int settings = 0;     // with a rate
  double any = kNaN;    // share with rate > 0
  double major = kNaN;  // share with rate > 0.25
};
std::vector<AnyMajor> SummarizeAnyMajor(const std::vector<SimulationSetting>& grid,
                                        const std::vector<SettingRate>& rates);

struct CoefficientRow {
  std::string name;
  double estimate = kNaN;
  double std_error = kNaN;
  double t = kNaN;
  double p = kNaN;
};

struct OlsTable {
  std::vector<CoefficientRow> rows;
  std::vector<std::string> dropped;   // aliased or all-zero columns
  std::vector<std::string> warnings;
  int observations = 0;
  int df = 0;
  double r2 = kNaN;
  Eigen::VectorXd residuals;
};

// OLS with classical standard errors and two-sided Student-t p-values.
// Columns that are all zero or aliased with earlier columns are dropped.
OlsTable Ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names);

// Two-sided p-value of a Student-t statistic.
double StudentTwoSidedP(double t, double df);

// Conflation percentage (0-100) per setting of one DGP family regressed on
// medium / high level dummies of its six factors plus an intercept.
OlsTable RateRegression(const std::vector<SimulationSetting>& grid,
                        const std::vector<SettingRate>& rates, sim::DgpKind dgp);

}  // namespace gpmmm::eval

#endif  // GPMMM_EVALUATION_HPP_
