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

#include "gpmmm/budget_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gpmmm/error.hpp"
#include "gpmmm/transforms.hpp"

namespace gpmmm::opt {
namespace {

double Total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// True when candidate a beats b.
bool Better(double profit_a, const std::vector<double>& a, double profit_b, const std::vector<double>& b) {
  if (profit_a != profit_b) return profit_a > profit_b;
  const double ta = Total(a), tb = Total(b);
  if (ta != tb) return ta < tb;
  return a < b;
}

int Lags(const mmm::FittedModel& m) { return m.spec.carryover ? m.spec.carryover->lags : 0; }

std::size_t DataIndex(const mmm::FittedModel& m, int period) {
  return static_cast<std::size_t>(period - m.data.periods.front());
}

// Dummy values at in-sample periods; zeros elsewhere.
std::vector<std::vector<double>> DummiesAt(const mmm::FittedModel& m, const std::vector<int>& periods) {
  std::vector<std::vector<double>> out;
  for (const std::string& name : m.spec.dummies) {
    const Column* col = nullptr;
    for (const Column& c : m.data.dummies)
      if (c.name == name) col = &c;
    std::vector<double> v(periods.size(), 0.0);
    if (col) {
      for (std::size_t i = 0; i < periods.size(); ++i) {
        if (periods[i] >= m.data.periods.front() && periods[i] <= m.data.periods.back())
          v[i] = col->values[DataIndex(m, periods[i])];
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

struct StockPaths {
  std::vector<int> periods;                              // affected periods
  std::vector<std::vector<std::vector<double>>> stock;   // [candidate][channel][period]
};

StockPaths BuildPaths(const mmm::FittedModel& m, const Window& w,
                      const std::vector<std::vector<double>>& candidates) {
  if (w.first > w.last) throw DomainError("window start is after its end");
  const int lags = Lags(m);
  StockPaths out;
  for (int p = w.first; p <= w.last + lags; ++p) out.periods.push_back(p);
  for (const auto& c : candidates)
    if (c.size() != m.num_channels()) throw DomainError("candidate spend has the wrong number of channels");
  if (!m.spec.carryover) {
    for (const auto& c : candidates) {
      std::vector<std::vector<double>> s;
      for (double v : c) s.emplace_back(out.periods.size(), v);
      out.stock.push_back(std::move(s));
    }
    return out;
  }
  if (w.first < m.periods.front())
    throw DomainError("window starts before the first usable training period " +
                      std::to_string(m.periods.front()));
  if (w.last + lags >= m.data.periods.back()) {
    std::ostringstream os;
    os << "window must end at least " << lags << " periods before the final training period "
       << m.data.periods.back() << " (ends at " << w.last << ")";
    throw DomainError(os.str());
  }
  for (const auto& c : candidates) {
    std::vector<std::vector<double>> s;
    for (std::size_t j = 0; j < c.size(); ++j) {
      std::vector<double> raw = m.data.channels[j].values;
      for (int p = w.first; p <= w.last; ++p) raw[DataIndex(m, p)] = c[j];
      const transforms::StockSeries series = transforms::Adstock(raw, *m.spec.carryover);
      std::vector<double> path;
      for (int p : out.periods) path.push_back(series.values[DataIndex(m, p) - static_cast<std::size_t>(series.offset)]);
      s.push_back(std::move(path));
    }
    out.stock.push_back(std::move(s));
  }
  return out;
}

// Sums of predicted outcome per candidate over the path periods.
std::vector<double> SumRevenue(const mmm::FittedModel& m, const StockPaths& paths) {
  const std::size_t np = paths.periods.size();
  const std::size_t nc = paths.stock.size();
  std::vector<int> periods;
  std::vector<std::vector<double>> stock(m.num_channels());
  for (std::size_t c = 0; c < nc; ++c) {
    periods.insert(periods.end(), paths.periods.begin(), paths.periods.end());
    for (std::size_t j = 0; j < m.num_channels(); ++j)
      stock[j].insert(stock[j].end(), paths.stock[c][j].begin(), paths.stock[c][j].end());
  }
  mmm::PredictOptions options;
  options.dummies = DummiesAt(m, periods);
  const mmm::Prediction p = mmm::PredictAtStock(m, periods, stock, options);
  std::vector<double> out(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < np; ++i) out[c] += p.outcome[static_cast<Eigen::Index>(c * np + i)];
  return out;
}

}  // namespace

SpendGrid SpendGrid::Linspace(double lo, double hi, int points) {
  if (points < 1 || !(hi >= lo)) throw DomainError("grid needs at least one point and lo <= hi");
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  v.back() = hi;
  SpendGrid g;
  g.levels = {v};
  return g;
}

SpendGrid SpendGrid::TrainingRange(const mmm::FittedModel& model, int points) {
  SpendGrid g;
  g.bounds = Bounds::kTrainingRange;
  for (const Column& c : model.data.channels) {
    const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
    g.levels.push_back(Linspace(*lo, *hi, points).levels[0]);
  }
  return g;
}

SpendGrid SpendGrid::Explicit(std::vector<std::vector<double>> levels) {
  SpendGrid g;
  g.levels = std::move(levels);
  g.Validate();
  return g;
}

void SpendGrid::Validate() const {
  if (levels.empty()) throw DomainError("spend grid has no channels");
  for (const auto& l : levels) {
    if (l.empty()) throw DomainError("spend grid has an empty channel");
    for (double v : l)
      if (!std::isfinite(v)) throw DomainError("spend grid has a non-finite level");
    if (!std::is_sorted(l.begin(), l.end())) throw DomainError("spend grid levels must be sorted");
  }
}

std::size_t SpendGrid::NumCandidates() const {
  std::size_t n = levels.empty() ? 0 : 1;
  for (const auto& l : levels) n *= l.size();
  return n;
}

std::vector<std::vector<double>> SpendGrid::Candidates() const {
  Validate();
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> idx(levels.size(), 0);
  for (std::size_t k = 0; k < NumCandidates(); ++k) {
    std::vector<double> c(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) c[j] = levels[j][idx[j]];
    out.push_back(std::move(c));
    for (std::size_t j = levels.size(); j-- > 0;) {
      if (++idx[j] < levels[j].size()) break;
      idx[j] = 0;
    }
  }
  return out;
}

OptimumResult OptimizeNoCarryover(const RevenueFn& revenue, const SpendGrid& grid, double price) {
  const std::vector<std::vector<double>> candidates = grid.Candidates();
  if (candidates.empty()) throw DomainError("empty spend grid");
  const std::vector<double> rev = revenue(candidates);
  if (rev.size() != candidates.size()) throw DomainError("revenue function returned the wrong count");
  OptimumResult r;
  bool have = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    SurfacePoint pt{candidates[i], rev[i], price * rev[i] - Total(candidates[i]), true};
    if (!have || Better(pt.profit, pt.spend, r.profit, r.spend)) {
      r.spend = pt.spend;
      r.revenue = pt.revenue;
      r.profit = pt.profit;
      have = true;
    }
    r.surface.push_back(std::move(pt));
  }
  return r;
}

OptimumResult OptimizeNoCarryover(const mmm::FittedModel& model, const SpendGrid& grid,
                                  const OptimizeOptions& options) {
  const int period = options.period.value_or(model.last_period() + 1);
  auto revenue = [&](const std::vector<std::vector<double>>& candidates) {
    StockPaths paths;
    paths.periods = {period};
    for (const auto& c : candidates) {
      if (c.size() != model.num_channels()) throw DomainError("candidate spend has the wrong number of channels");
      std::vector<std::vector<double>> s;
      for (double v : c) s.push_back({v});
      paths.stock.push_back(std::move(s));
    }
    return SumRevenue(model, paths);
  };
  OptimumResult r = OptimizeNoCarryover(revenue, grid, options.price);
  r.periods = {period};
  return r;
}

std::vector<std::vector<double>> PerDrawOptima(const mmm::FittedModel& model, const SpendGrid& grid,
                                               const OptimizeOptions& options) {
  const int period = options.period.value_or(model.last_period() + 1);
  const std::vector<std::vector<double>> candidates = grid.Candidates();
  std::vector<int> periods(candidates.size(), period);
  std::vector<std::vector<double>> stock(model.num_channels());
  for (const auto& c : candidates)
    for (std::size_t j = 0; j < c.size(); ++j) stock[j].push_back(c[j]);
  mmm::PredictOptions po;
  po.dummies = DummiesAt(model, periods);
  const mmm::Prediction p = mmm::PredictAtStock(model, periods, stock, po);
  std::vector<std::vector<double>> out;
  for (const Eigen::VectorXd& d : p.draw_means) {
    auto revenue = [&](const std::vector<std::vector<double>>&) {
      std::vector<double> v(d.data(), d.data() + d.size());
      if (model.spec.log_outcome)
        for (double& x : v) x = std::exp(x);
      return v;
    };
    out.push_back(OptimizeNoCarryover(revenue, grid, options.price).spend);
  }
  return out;
}

LogLogOptimum ClosedFormLogLog(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw DomainError("alpha and beta must be finite");
  if (beta >= 1.0) throw DomainError("elasticity >= 1: profit is unbounded in spend");
  if (beta <= 0.0) return {0.0, true};
  return {std::pow(std::exp(alpha) * beta, 1.0 / (1.0 - beta)), false};
}

LogLogOptimum OptimizeLogLog(const mmm::FittedModel& model, int period, mmm::BetaExtrapolation mode) {
  if (model.spec.kind != mmm::ModelKind::kLogTimeVarying || model.num_channels() != 1)
    throw DomainError("the closed form needs a single-channel log-log time-varying model");
  const double alpha = mmm::LogLinearIntercept(model, period, mode);
  const double beta = mmm::ElasticityAt(model, period, 0, mode).mean;
  return ClosedFormLogLog(alpha, beta);
}

std::vector<double> WindowRevenue(const mmm::FittedModel& model, const Window& window,
                                  const std::vector<std::vector<double>>& candidates,
                                  std::vector<int>* periods) {
  const StockPaths paths = BuildPaths(model, window, candidates);
  if (periods) *periods = paths.periods;
  return SumRevenue(model, paths);
}

OptimumResult OptimizeWithCarryover(const mmm::FittedModel& model, const Window& window,
                                    const SpendGrid& grid, double price) {
  const std::vector<std::vector<double>> candidates = grid.Candidates();
  if (candidates.empty()) throw DomainError("empty spend grid");
  if (!model.spec.carryover && window.last >= model.data.periods.back())
    throw DomainError("window must lie inside the training periods");
  const StockPaths paths = BuildPaths(model, window, candidates);
  const int window_len = window.last - window.first + 1;

  std::vector<std::pair<double, double>> range;
  for (const auto& s : model.stock) {
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    range.emplace_back(*lo, *hi);
  }
  StockPaths feasible;
  feasible.periods = paths.periods;
  std::vector<std::size_t> kept;
  std::string violation;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bool ok = true;
    for (std::size_t j = 0; j < range.size() && ok; ++j) {
      const double tol = 1e-12 * std::max(1.0, std::abs(range[j].second));
      for (double v : paths.stock[c][j]) {
        if (v < range[j].first - tol || v > range[j].second + tol) {
          std::ostringstream os;
          os << "channel " << model.data.channels[j].name << " stock " << v << " outside ["
             << range[j].first << ", " << range[j].second << "]";
          violation = os.str();
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      kept.push_back(c);
      feasible.stock.push_back(paths.stock[c]);
    }
  }
  if (kept.empty()) throw InfeasibleError("every candidate leaves the training stock range; last: " + violation);
  const std::vector<double> rev = SumRevenue(model, feasible);

  OptimumResult r;
  r.periods = paths.periods;
  bool have = false;
  std::size_t k = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    SurfacePoint pt;
    pt.spend = candidates[c];
    pt.feasible = k < kept.size() && kept[k] == c;
    if (pt.feasible) {
      pt.revenue = rev[k++];
      pt.profit = price * pt.revenue - window_len * Total(pt.spend);
      if (!have || Better(pt.profit, pt.spend, r.profit, r.spend)) {
        r.spend = pt.spend;
        r.revenue = pt.revenue;
        r.profit = pt.profit;
        have = true;
      }
    }
    r.surface.push_back(std::move(pt));
  }
  return r;
}

AllocationSet EnumerateAllocations(double total, int channels, double step,
                                   const std::vector<std::pair<double, double>>& ranges) {
  if (channels < 1) throw DomainError("need at least one channel");
  if (!(step > 0.0) || step > 1.0) throw DomainError("share step must be in (0, 1]");
  const long units = std::lround(1.0 / step);
  if (std::abs(static_cast<double>(units) * step - 1.0) > 1e-9)
    throw DomainError("share step must divide 1 exactly");
  if (!ranges.empty() && ranges.size() != static_cast<std::size_t>(channels))
    throw DomainError("one spend range per channel is required");
  AllocationSet out;
  std::vector<int> parts(static_cast<std::size_t>(channels), 0);
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == channels - 1) {
      parts[j] = left;
      ++out.unfiltered;
      Allocation a;
      a.units = parts;
      bool ok = true;
      for (int c = 0; c < channels; ++c) {
        const double share = static_cast<double>(parts[c]) / static_cast<double>(units);
        a.shares.push_back(share);
        a.spend.push_back(share * total);
        if (!ranges.empty() && (a.spend.back() < ranges[c].first || a.spend.back() > ranges[c].second))
          ok = false;
      }
      if (ok) out.allocations.push_back(std::move(a));
      return;
    }
    for (int u = 0; u <= left; ++u) {
      parts[j] = u;
      rec(j + 1, left - u);
    }
  };
  rec(0, static_cast<int>(units));
  out.empty = out.allocations.empty();
  return out;
}

ConflationCost ComputeConflationCost(const mmm::FittedModel& a, const mmm::FittedModel& b,
                                     const std::vector<Allocation>& allocations, const Window& window) {
  if (allocations.empty()) throw DomainError("no allocations to compare");
  if (a.data.periods != b.data.periods || a.data.outcome != b.data.outcome)
    throw DomainError("both models must be fitted on the same dataset");
  std::vector<std::vector<double>> spends;
  for (const Allocation& al : allocations) spends.push_back(al.spend);
  const std::vector<double> ra = WindowRevenue(a, window, spends);
  const std::vector<double> rb = WindowRevenue(b, window, spends);
  ConflationCost c;
  c.best_a = static_cast<std::size_t>(std::max_element(ra.begin(), ra.end()) - ra.begin());
  c.best_b = static_cast<std::size_t>(std::max_element(rb.begin(), rb.end()) - rb.begin());
  c.revenue_a_at_a = ra[c.best_a];
  c.revenue_a_at_b = ra[c.best_b];
  c.revenue_b_at_b = rb[c.best_b];
  c.revenue_b_at_a = rb[c.best_a];
  c.cost_if_a_true = c.revenue_a_at_a - c.revenue_a_at_b;
  c.cost_if_b_true = c.revenue_b_at_b - c.revenue_b_at_a;
  return c;
}

}  // namespace gpmmm::opt
