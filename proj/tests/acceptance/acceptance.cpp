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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when a criterion fails that is not listed with --known-failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unistd.h>

#include "gpmmm/budget_opt.hpp"
#include "gpmmm/dgp_sim.hpp"
#include "gpmmm/evaluation.hpp"
#include "gpmmm/gp_core.hpp"
#include "gpmmm/io/json.hpp"
#include "gpmmm/kernels.hpp"
#include "gpmmm/mmm_models.hpp"
#include "gpmmm/random.hpp"
#include "gpmmm/separation.hpp"
#include "gpmmm/theory_checks.hpp"
#include "gpmmm/transforms.hpp"

namespace {

using namespace gpmmm;
namespace fs = std::filesystem;
using kernels::Kernel;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

double DenseLogDensity(const Eigen::MatrixXd& cov, const Eigen::VectorXd& y) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
  const double quad = y.dot(lu.solve(y));
  return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * M_PI);
}

Outcome Criterion1() {
  Outcome out;
  Rng rng = MakeRng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 40);
  auto pos = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  auto random_kernel = [&](int which) {
    switch (which % 4) {
      case 0: return Kernel::SE(pos(0.1, 3), pos(0.1, 5));
      case 1: return Kernel::Periodic(pos(0.1, 3), pos(0.2, 2), pos(2, 20));
      case 2: return Kernel::MakeTrendSeason({pos(0.1, 3), pos(1, 10)}, {pos(0.1, 2), pos(0.3, 2), pos(3, 15)});
      default: return Kernel::MakeSum({Kernel::SE(pos(0.1, 3), pos(0.1, 5)), Kernel::Periodic(1, 1, pos(2, 9))});
    }
  };
  double asym = 0.0, min_eig = 0.0, period_err = 0.0, sum_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> z(static_cast<std::size_t>(size(rng)));
    for (double& v : z) v = pos(-25, 25);
    const Kernel k = random_kernel(trial);
    const Eigen::MatrixXd g = kernels::Gram(k, z);
    asym = std::max(asym, (g - g.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff() / g.diagonal().maxCoeff());
    const double cycle = pos(2, 20);
    const Kernel p = Kernel::Periodic(pos(0.1, 3), pos(0.2, 2), cycle);
    const double a = pos(-10, 10), b = pos(-10, 10);
    period_err = std::max(period_err, std::abs(kernels::Evaluate(p, a, b) - kernels::Evaluate(p, a + cycle, b)));
    const Kernel k2 = random_kernel(trial + 1);
    sum_err = std::max(sum_err,
                       (kernels::Gram(Kernel::MakeSum({k, k2}), z) - g - kernels::Gram(k2, z)).cwiseAbs().maxCoeff());
  }
  const bool kernels_ok = asym == 0.0 && min_eig > -1e-9 && period_err < 1e-12 && sum_err < 1e-12;

  // GP posterior.
  std::vector<double> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(0.6 * i);
  const Kernel se = Kernel::SE(1.0, 1.0);
  const Eigen::VectorXd ys = gp::SamplePrior(se, xs, 9);
  const gp::GpPosterior exact = gp::GpPosterior::FromKernel(se, xs, ys, 1e-9);
  const double interp = (gp::PosteriorPredict(exact, xs).mean - ys).cwiseAbs().maxCoeff();
  const std::vector<double> far = {xs.back() + 60.0};
  const gp::PredictiveMoments m = gp::PosteriorPredict(exact, far);
  const double revert = std::max(std::abs(m.mean[0]), std::abs(m.variance[0] - 1.0));
  double lml_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(size(rng)));
    for (double& v : x) v = pos(0, 10);
    const Kernel k = Kernel::SE(pos(0.3, 2), pos(0.3, 3));
    const double sigma = pos(0.1, 0.6);
    Eigen::VectorXd y = gp::SamplePrior(k, x, 500 + static_cast<std::uint64_t>(trial));
    std::normal_distribution<double> n(0.0, sigma);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += n(rng);
    Eigen::MatrixXd cov = kernels::Gram(k, x);
    cov.diagonal().array() += sigma * sigma;
    lml_err = std::max(lml_err, std::abs(gp::GpPosterior::FromKernel(k, x, y, sigma).log_marginal_likelihood() -
                                         DenseLogDensity(cov, y)));
  }
  const bool gp_ok = interp < 1e-5 && revert < 1e-6 && lml_err <= 1e-8;
  out.pass = kernels_ok && gp_ok;
  out.detail = Fmt("asym %.1e, min eig/diag %.1e, periodicity %.1e, sum %.1e; ", asym, min_eig, period_err, sum_err) +
               Fmt("interpolation %.1e, reversion %.1e, lml vs dense %.1e", interp, revert, lml_err);
  return out;
}

Outcome Criterion2() {
  Rng rng = MakeRng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double hill_err = 0.0, reach_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const transforms::HillParams p{0.01 + 100 * u(rng), 0.1 + 5 * u(rng)};
    hill_err = std::max(hill_err, std::abs(transforms::Hill(p.k, p) - 0.5));
    const double x = 50 * u(rng), k = 0.01 + 20 * u(rng);
    reach_err = std::max(reach_err, std::abs(transforms::Hill(x, {k, 1.0}) - x / (x + k)));
  }
  transforms::StockSpec geo;
  geo.decay = 0.5;
  geo.lags = 2;
  const std::vector<double> ex = {1, 2, 4};
  const double adstock = transforms::Adstock(ex, geo).values.at(0);

  std::vector<double> x(50);
  for (double& v : x) v = 10 * u(rng);
  const double lambda = 0.6;
  double koyck_err = 0.0, stock = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    stock = transforms::KoyckStep(stock, x[t], lambda);
    double direct = 0.0;
    for (std::size_t l = 0; l <= t; ++l) direct += std::pow(lambda, static_cast<double>(l)) * x[t - l];
    koyck_err = std::max(koyck_err, std::abs(stock - direct));
  }
  transforms::StockSpec full;
  full.decay = lambda;
  full.lags = 49;
  double norm = 0.0;
  for (int l = 0; l <= 49; ++l) norm += std::pow(lambda, l);
  koyck_err = std::max(koyck_err, std::abs(transforms::Adstock(x, full).values.at(0) * norm - stock));

  Outcome out;
  out.pass = hill_err < 1e-12 && reach_err <= 1e-12 && adstock == 3.0 && koyck_err <= 1e-9;
  out.detail = Fmt("hill(k) %.1e, reach %.1e, adstock(1,2,4) = %.17g, koyck %.1e", hill_err, reach_err, adstock,
                   koyck_err);
  return out;
}

Outcome Criterion3() {
  const std::vector<theory::Check> checks = theory::RunSuite(1, 1);
  Outcome out;
  int passed = 0;
  for (const auto& c : checks) {
    passed += c.passed;
    if (!c.passed) out.detail += c.name + " failed; ";
  }
  out.pass = passed == static_cast<int>(checks.size()) && !checks.empty();
  out.detail += std::to_string(passed) + "/" + std::to_string(checks.size()) + " identity and Monte Carlo checks";
  return out;
}

struct ConflationCells {
  eval::MegasimResult result;
  std::vector<eval::SimulationSetting> grid;
  double Rate(std::size_t i) const { return result.rates[i].rate.value_or(std::nan("")); }
};

const ConflationCells& Cells() {
  static const ConflationCells cells = [] {
    ConflationCells c;
    int id = 0;
    for (auto kind : {sim::DgpKind::kNonlinearGP, sim::DgpKind::kTimeVaryingGP}) {
      auto high = eval::MidSetting(kind, id++), low = eval::MidSetting(kind, id++);
      for (auto f : {eval::Factor::kSmoothness, eval::Factor::kNoise, eval::Factor::kCarryover}) {
        high.SetLevel(f, 2);
        low.SetLevel(f, 0);
      }
      auto ar1 = eval::MidSetting(kind, id++), ar0 = eval::MidSetting(kind, id++);
      ar1.SetLevel(eval::Factor::kArCoef, 2);
      ar0.SetLevel(eval::Factor::kArCoef, 0);
      for (auto* s : {&high, &low, &ar1, &ar0}) {
        s->replicates = 20;
        c.grid.push_back(*s);
      }
    }
    eval::MegasimOptions o;
    o.master_seed = 2024;
    o.mode = eval::LabelMode::kInterval;
    o.posterior_draws = 200;
    c.result = eval::Megasim(c.grid, o);
    return c;
  }();
  return cells;
}

Outcome Criterion4() {
  const ConflationCells& c = Cells();
  const double nl = 100 * (c.Rate(0) - c.Rate(1)), tv = 100 * (c.Rate(4) - c.Rate(5));
  Outcome out;
  out.pass = nl >= 20 && tv >= 20;
  out.detail = Fmt("nonlinear %.0f%% vs %.0f%% (%+.0f pts); ", 100 * c.Rate(0), 100 * c.Rate(1), nl) +
               Fmt("time-varying %.0f%% vs %.0f%% (%+.0f pts); need >= 20 pts each", 100 * c.Rate(4),
                   100 * c.Rate(5), tv);
  return out;
}

Outcome Criterion5() {
  const ConflationCells& c = Cells();
  const double tv = 100 * (c.Rate(6) - c.Rate(7)), nl = 100 * (c.Rate(2) - c.Rate(3));
  Outcome out;
  out.pass = tv >= 10 && std::abs(nl) <= 10;
  out.detail = Fmt("time-varying AR contrast %+.0f pts (need >= 10), nonlinear %+.0f pts (need within 10)", tv, nl);
  return out;
}

Outcome Criterion6() {
  Rng rng = MakeRng(606);
  std::uniform_real_distribution<double> ua(-1.0, 1.0), ub(0.1, 0.8);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = ua(rng), beta = ub(rng);
    const double closed = opt::ClosedFormLogLog(alpha, beta).spend;
    const double step = 1e-4, top = 2.0 * closed + 1.0;
    double best_x = 0.0, best = 0.0;
    for (long j = 1; j * step <= top; ++j) {
      const double x = j * step;
      const double profit = std::exp(alpha) * std::pow(x, beta) - x;
      if (profit > best) {
        best = profit;
        best_x = x;
      }
    }
    worst = std::max(worst, std::abs(best_x - closed) / step);
  }
  const double exact = opt::ClosedFormLogLog(0.0, 0.5).spend;
  Outcome out;
  out.pass = worst <= 1.0 && exact == 0.25;
  out.detail = Fmt("max |closed - grid| = %.3f steps over 100 draws; (0, 0.5) -> %.17g", worst, exact);
  return out;
}

Outcome Criterion7() {
  const sim::SimDataset s = sim::GenSigmoidCase(sim::kSigmoidDefaultSeed);
  const Dataset data = s.ToDataset();
  const mmm::FittedModel nl = mmm::Fit(data, mmm::NonlinearSpec(), 1);
  const mmm::FittedModel tv = mmm::Fit(data, mmm::TimeVaryingSpec(), 1);
  const double a = opt::OptimizeNoCarryover(nl, opt::SpendGrid::TrainingRange(nl, 50)).spend[0];
  const double b = opt::OptimizeNoCarryover(tv, opt::SpendGrid::TrainingRange(tv, 50)).spend[0];
  const auto& x = data.channels[0].values;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double share = std::abs(a - b) / (*hi - *lo);
  Outcome out;
  out.pass = share >= 0.20;
  out.detail = Fmt("nonlinear %.1f vs time-varying %.1f: gap %.1f%% of the spend range %.1f", a, b, 100 * share,
                   *hi - *lo);
  return out;
}

Outcome Criterion8() {
  auto run = [](sep::Policy policy, bool intro, int within, int& median) {
    int ok = 0;
    std::vector<int> periods;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const sep::Environment env = intro ? sep::IntroEnvironment(seed) : sep::LogEnvironment(seed);
      sep::SeparationConfig cfg;
      cfg.policy = policy;
      cfg.test_periods = 8;
      const sep::SeparationTrajectory t = sep::RunTest(env, cfg, seed);
      if (t.CorrectWinner() && *t.separation_period <= within) {
        ++ok;
        periods.push_back(*t.separation_period);
      }
    }
    std::sort(periods.begin(), periods.end());
    median = periods.empty() ? 1000 : periods[(periods.size() - 1) / 2];
    return ok;
  };
  int med_nl = 0, med_tv = 0, med_seesaw = 0;
  const int max_nl = run(sep::Policy::kMaximal, false, 5, med_nl);
  const int max_tv = run(sep::Policy::kMaximal, true, 5, med_tv);
  const int seesaw = run(sep::Policy::kSeesaw, false, 8, med_seesaw);
  Outcome out;
  out.pass = max_nl >= 8 && max_tv >= 8 && seesaw >= 7 && med_tv <= med_nl;
  out.detail = Fmt("maximal nonlinear %.0f/10, maximal time-varying %.0f/10, seesaw nonlinear %.0f/10; ", max_nl,
                   max_tv, seesaw) +
               Fmt("median period tv %.0f <= nl %.0f", med_tv, med_nl);
  return out;
}

Outcome Criterion9() {
  const theory::MonotoneDemoReport r = theory::MonotoneConflationDemo(theory::kMonotoneDemoSeed);
  Outcome out;
  out.pass = r.reconstruction_residual < 1e-9 && r.conflated && r.shuffled_residual > r.noise_floor;
  out.detail = Fmt("reconstruction %.1e, conflated %.0f (nl mse %.3f, tv mse %.3f), ", r.reconstruction_residual,
                   r.conflated, r.nonlinear_mse, r.time_varying_mse) +
               Fmt("shuffled residual %.3f > noise floor %.3f", r.shuffled_residual, r.noise_floor);
  return out;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome Criterion10(const std::string& exe) {
  const fs::path dir = fs::temp_directory_path() / ("gpmmm_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) { std::ofstream(dir / name) << text; };
  write("sim.json", R"({"generator": "sigmoid"})");
  write("tv.json", R"({"model": {"kind": "time_varying_gp"}})");
  write("sep.json", R"({"runs": 2, "environment": {"kind": "intro"}, "test": {"test_periods": 3}})");
  write("mega.json", R"({"options": {"master_seed": 9, "workers": 2}, "replicates": 2, "periods": 40,
    "holdout": 5, "cells": [{"dgp": "nonlinear_gp"}, {"dgp": "hill", "levels": {"noise": "high"}}]})");
  write("plot.json", R"({"x": "x", "y": ["mean"], "group": "component"})");
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"sim", "simulate -c sim.json -o sim"},
      {"fit_nl", "fit -d sim/dataset.csv -o fit_nl"},
      {"fit_tv", "fit -d sim/dataset.csv -c tv.json -o fit_tv"},
      {"eval", "evaluate -d sim/dataset.csv -o eval"},
      {"opt", "optimize -m fit_nl/model.json -m fit_tv/model.json -o opt"},
      {"plot", "plot fit_tv/components.csv -c plot.json -o plot"},
      {"sep", "separate -c sep.json -o sep"},
      {"theory", "theory -o theory"},
      {"mega", "megasim -c mega.json -o mega"},
  };
  Outcome out;
  int reproduced = 0;
  for (const auto& [name, args] : runs) {
    const std::string cd = "cd '" + dir.string() + "' && '" + exe + "' ";
    if (std::system((cd + args + " > " + name + ".log 2>&1").c_str()) != 0) {
      out.pass = false;
      out.detail += name + " failed; ";
      continue;
    }
    if (std::system((cd + "replay " + name + "/manifest.json -o " + name + "_replay > " + name + "_replay.log 2>&1")
                        .c_str()) == 0 &&
        Slurp(dir / (name + "_replay.log")).rfind("reproduced ", 0) == 0) {
      ++reproduced;
    } else {
      out.pass = false;
      out.detail += name + " not reproduced; ";
    }
  }
  const std::string eval = Slurp(dir / "eval" / "evaluation.json");
  const bool golden = io::ParseJson(eval.empty() ? "{}" : eval).value("conflated", false);
  out.pass = out.pass && golden;
  out.detail += std::to_string(reproduced) + "/" + std::to_string(runs.size()) +
                " pipelines reproduced bit-exactly; sigmoid conflation label " + (golden ? "true" : "false");
  if (out.pass) fs::remove_all(dir);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string exe;
  std::set<int> known, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--mmmgp" && i + 1 < argc) {
      exe = fs::absolute(argv[++i]).string();
    } else if (a == "--known-failure" && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else if (a == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance --mmmgp PATH [--known-failure N]... [--only N]...\n";
      return 2;
    }
  }
  const std::vector<std::function<Outcome()>> criteria = {
      Criterion1, Criterion2, Criterion3, Criterion4, Criterion5,
      Criterion6, Criterion7, Criterion8, Criterion9, [&] { return Criterion10(exe); }};
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool excused = !o.pass && known.count(n);
    if (!o.pass && !excused) ++unexpected;
    std::printf("criterion %2d: %s%s (%.1fs) %s\n", n, o.pass ? "PASS" : "FAIL", excused ? " [known failure]" : "",
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
