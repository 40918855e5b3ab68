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

// Grid-based spend optimization under a fitted model.

#ifndef GPMMM_BUDGET_OPT_HPP_
#define GPMMM_BUDGET_OPT_HPP_

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpmmm/mmm_models.hpp"

namespace gpmmm::opt {

// Per-channel candidate spend levels.
struct SpendGrid {
  enum class Bounds { kTrainingRange, kExplicit };
  std::vector<std::vector<double>> levels;
  Bounds bounds = Bounds::kExplicit;

  // `points` evenly spaced levels over each channel's observed raw spend.
  static SpendGrid TrainingRange(const mmm::FittedModel& model, int points);
  static SpendGrid Explicit(std::vector<std::vector<double>> levels);
  static SpendGrid Linspace(double lo, double hi, int points);

  // Throws DomainError when a channel is empty, unsorted or non-finite.
  void Validate() const;
  std::size_t NumCandidates() const;
  // Cartesian product, first channel slowest.
  std::vector<std::vector<double>> Candidates() const;
};

struct SurfacePoint {
  std::vector<double> spend;
  double revenue = 0.0;
  double profit = 0.0;
  bool feasible = true;
};

struct OptimumResult {
  std::vector<double> spend;
  double revenue = 0.0;
  double profit = 0.0;
  std::vector<int> periods;        // periods whose revenue is summed
  std::vector<SurfacePoint> surface;
};

struct OptimizeOptions {
  double price = 1.0;           // outcome units to currency
  std::optional<int> period;    // default: the period after training
};

// Batch revenue: one value per candidate spend vector.
using RevenueFn = std::function<std::vector<double>(const std::vector<std::vector<double>>&)>;

// Maximizes price * revenue - total spend over the grid. Ties go to the
// lower total spend, then the lexicographically smaller vector.
OptimumResult OptimizeNoCarryover(const RevenueFn& revenue, const SpendGrid& grid, double price = 1.0);

// Posterior-mean revenue of the model at one period, spend used as stock.
OptimumResult OptimizeNoCarryover(const mmm::FittedModel& model, const SpendGrid& grid,
                                  const OptimizeOptions& options = {});

// The optimum under each hyperparameter draw's posterior mean.
std::vector<std::vector<double>> PerDrawOptima(const mmm::FittedModel& model, const SpendGrid& grid,
                                               const OptimizeOptions& options = {});

struct LogLogOptimum {
  double spend = 0.0;
  bool zero_boundary = false;  // beta <= 0: spending nothing is optimal
};

// argmax exp(alpha) x^beta - x = (exp(alpha) beta)^(1 / (1 - beta)).
// Throws DomainError for beta >= 1 (profit unbounded).
LogLogOptimum ClosedFormLogLog(double alpha, double beta);

// Closed form at `period` for a single-channel log-log time-varying model.
LogLogOptimum OptimizeLogLog(const mmm::FittedModel& model, int period,
                             mmm::BetaExtrapolation mode = mmm::BetaExtrapolation::kGp);

// An in-sample window [first, last] of training periods.
struct Window {
  int first = 0;
  int last = 0;
};

// Candidate spend is held constant over the window and spliced into the
// observed spend; stocks are recomputed and revenue is summed over
// first..last+L. Candidates whose stock path leaves the training stock range
// are infeasible. Throws DomainError if last + L is not before the final
// training period and InfeasibleError if nothing is feasible.
OptimumResult OptimizeWithCarryover(const mmm::FittedModel& model, const Window& window,
                                    const SpendGrid& grid, double price = 1.0);

// Predicted cumulative outcome over the affected periods for each candidate.
// Without carryover the window may extend past the training data.
std::vector<double> WindowRevenue(const mmm::FittedModel& model, const Window& window,
                                  const std::vector<std::vector<double>>& candidates,
                                  std::vector<int>* periods = nullptr);

struct Allocation {
  std::vector<double> shares;
  std::vector<int> units;  // shares in steps
  std::vector<double> spend;
};

struct AllocationSet {
  std::vector<Allocation> allocations;
  int unfiltered = 0;
  bool empty = true;
};

// Compositions of 1 into `channels` shares on a `step` lattice, kept when
// every channel's spend (share * total) lies in its [lo, hi] range.
AllocationSet EnumerateAllocations(double total, int channels, double step,
                                   const std::vector<std::pair<double, double>>& ranges = {});

struct ConflationCost {
  std::size_t best_a = 0;  // index into the allocation list
  std::size_t best_b = 0;
  double revenue_a_at_a = 0.0;
  double revenue_a_at_b = 0.0;
  double revenue_b_at_b = 0.0;
  double revenue_b_at_a = 0.0;
  double cost_if_a_true = 0.0;
  double cost_if_b_true = 0.0;
};

ConflationCost ComputeConflationCost(const mmm::FittedModel& a, const mmm::FittedModel& b,
                                     const std::vector<Allocation>& allocations, const Window& window);

}  // namespace gpmmm::opt

#endif  // GPMMM_BUDGET_OPT_HPP_
