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

#include <vector>

#include <benchmark/benchmark.h>

#include "gpmmm/budget_opt.hpp"
#include "gpmmm/dgp_sim.hpp"
#include "gpmmm/evaluation.hpp"
#include "gpmmm/gp_core.hpp"
#include "gpmmm/kernels.hpp"
#include "gpmmm/mmm_models.hpp"
#include "gpmmm/transforms.hpp"

namespace {

using namespace gpmmm;

std::vector<double> Periods(int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[i] = i + 1;
  return t;
}

void BM_Gram(benchmark::State& state) {
  const auto t = Periods(static_cast<int>(state.range(0)));
  const auto k = kernels::Kernel::MakeTrendSeason({1.0, 10.0}, {0.5, 1.0, 52.0});
  for (auto _ : state) benchmark::DoNotOptimize(kernels::Gram(k, t));
}
BENCHMARK(BM_Gram)->Arg(100)->Arg(400);

void BM_Posterior(benchmark::State& state) {
  const auto t = Periods(static_cast<int>(state.range(0)));
  const auto k = kernels::Kernel::SE(1.0, 10.0);
  const Eigen::VectorXd y = gp::SamplePrior(k, t, 3);
  for (auto _ : state) benchmark::DoNotOptimize(gp::GpPosterior::FromKernel(k, t, y, 0.3).log_marginal_likelihood());
}
BENCHMARK(BM_Posterior)->Arg(100)->Arg(400);

void BM_Adstock(benchmark::State& state) {
  std::vector<double> x(1000, 1.0);
  transforms::StockSpec spec;
  spec.decay = 0.7;
  spec.lags = 8;
  for (auto _ : state) benchmark::DoNotOptimize(transforms::Adstock(x, spec));
}
BENCHMARK(BM_Adstock);

Dataset BenchData() {
  sim::SpendingSpec spending;
  spending.periods = 100;
  return sim::GenDataset({}, spending, 5).ToDataset();
}

void BM_FitNonlinear(benchmark::State& state) {
  const Dataset d = BenchData();
  for (auto _ : state) benchmark::DoNotOptimize(mmm::Fit(d, mmm::NonlinearSpec(), 1));
}
BENCHMARK(BM_FitNonlinear)->Unit(benchmark::kMillisecond);

void BM_FitTimeVarying(benchmark::State& state) {
  const Dataset d = BenchData();
  for (auto _ : state) benchmark::DoNotOptimize(mmm::Fit(d, mmm::TimeVaryingSpec(), 1));
}
BENCHMARK(BM_FitTimeVarying)->Unit(benchmark::kMillisecond);

void BM_GridOptimize(benchmark::State& state) {
  const mmm::FittedModel m = mmm::Fit(BenchData(), mmm::NonlinearSpec(), 1);
  const opt::SpendGrid grid = opt::SpendGrid::TrainingRange(m, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(opt::OptimizeNoCarryover(m, grid));
}
BENCHMARK(BM_GridOptimize)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_MegasimReplicate(benchmark::State& state) {
  const eval::SimulationSetting s = eval::MidSetting(sim::DgpKind::kTimeVaryingGP);
  eval::MegasimOptions o;
  o.workers = 1;
  int rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(eval::RunReplicate(s, rep++, o));
}
BENCHMARK(BM_MegasimReplicate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
