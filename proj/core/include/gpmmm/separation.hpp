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

// Separation tests: adaptive single-channel spending policies that make the
// nonlinear and time-varying models disagree, with refitting after every
// test period.

#ifndef GPMMM_SEPARATION_HPP_
#define GPMMM_SEPARATION_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpmmm/dataset.hpp"
#include "gpmmm/dgp_sim.hpp"
#include "gpmmm/mmm_models.hpp"

namespace gpmmm::sep {

enum class Policy { kMaximal, kSeesaw };
enum class Rule {
  kAuto,      // interval under Metropolis inference, ratio otherwise
  kInterval,  // disjoint 95% posterior RMSE intervals
  kRatio,     // larger point RMSE / smaller >= ratio
};

const char* ToString(Policy p);
Policy PolicyFromString(const std::string& s);
const char* ToString(Rule r);
Rule RuleFromString(const std::string& s);

struct SeparationConfig {
  std::vector<double> candidates;  // empty: 21 levels over the history range
  Policy policy = Policy::kMaximal;
  int test_periods = 8;
  Rule rule = Rule::kAuto;
  double ratio = 1.25;
  mmm::InferenceSpec inference;

  void Validate() const;
};

using Response = std::function<double(int, double)>;

// A true single-channel DGP plus its observed history. `make_response`
// returns a fresh noise-free response (period, spend) -> outcome; responses
// may carry state (a continued GP path), so each run starts a new one.
struct Environment {
  std::string name;
  bool time_varying = false;
  Dataset history;
  std::function<Response()> make_response;
  double noise_sd = 0.0;
};

// y = intercept + scale ln(x) + noise with AR(1) spend. Calibrated constants.
struct LogEnvConfig {
  int periods = 48;
  double intercept = 5.0;
  double scale = 3.0;
  double noise_sd = 0.15;
  sim::SpendingSpec spending{2.0, 0.7, 1.5, 6.67, 48, 0.5};
};
Environment LogEnvironment(std::uint64_t seed, const LogEnvConfig& config = {});

sim::IntroConfig WithPeriods(int periods);

// The cyclical-effectiveness example: beta_t follows the sine and test
// outcomes are beta_t x + noise.
Environment IntroEnvironment(std::uint64_t seed, sim::IntroConfig config = WithPeriods(48));

// GP DGPs from the simulation module. The latent f or beta_t path is
// continued by conditional simulation during the test. No carryover.
Environment GpEnvironment(const sim::DgpSpec& dgp, const sim::SpendingSpec& spending, std::uint64_t seed);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RmseSummary {
  double rmse = kNaN;
  double lower = kNaN;
  double upper = kNaN;
};

struct TrajectoryRow {
  int test_period = 0;
  int period = 0;
  double spend = kNaN;
  double predicted_nl = kNaN;
  double predicted_tv = kNaN;
  double realized = kNaN;
  double separation = kNaN;  // |predicted_nl - predicted_tv| at the chosen spend
  RmseSummary nl;
  RmseSummary tv;
  bool fired = false;
};

struct SeparationTrajectory {
  std::string environment;
  Policy policy = Policy::kMaximal;
  Rule rule = Rule::kRatio;
  bool truth_time_varying = false;
  RmseSummary initial_nl;
  RmseSummary initial_tv;
  std::vector<TrajectoryRow> rows;
  std::optional<int> separation_period;
  std::string winner;  // "nonlinear", "time_varying" or empty
  std::string status = "ok";
  std::vector<std::string> warnings;

  bool CorrectWinner() const;
};

struct MaximalChoice {
  double spend = kNaN;
  double separation = kNaN;
  double predicted_nl = kNaN;
  double predicted_tv = kNaN;
  std::vector<std::string> warnings;
};

// argmax over candidates of |nl(x) - tv(x)|, ties to the smallest candidate.
// Candidates whose prediction throws are skipped; all skipped is an error.
MaximalChoice MaximalStep(const std::function<double(double)>& nl, const std::function<double(double)>& tv,
                          const std::vector<double>& candidates);

// Posterior-mean predictions of both models at `next_period`.
MaximalChoice MaximalStep(const mmm::FittedModel& nl, const mmm::FittedModel& tv,
                          const std::vector<double>& candidates, int next_period);

// Odd test periods (1-based) spend high, even ones low.
double SeesawStep(int test_period, double high, double low);

// 21 evenly spaced levels over the observed spend range.
std::vector<double> DefaultCandidates(const Dataset& history, int count = 21);

// In-sample RMSE of the posterior mean; with several hyperparameter draws
// also the 95% interval of per-draw RMSEs.
RmseSummary InSampleRmse(const mmm::FittedModel& model);

bool RuleFires(Rule rule, double ratio, const RmseSummary& nl, const RmseSummary& tv);

SeparationTrajectory RunTest(const Environment& env, const SeparationConfig& config, std::uint64_t seed);

}  // namespace gpmmm::sep

#endif  // GPMMM_SEPARATION_HPP_
