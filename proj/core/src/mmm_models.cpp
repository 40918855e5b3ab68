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

#include "gpmmm/mmm_models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "gpmmm/error.hpp"
#include "gpmmm/random.hpp"
#include "gpmmm/simplex.hpp"

namespace gpmmm::mmm {
namespace {

constexpr double kZ95 = 1.959963984540054;

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double Sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double Rms(const std::vector<double>& v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double SafeScale(double s) { return (std::isfinite(s) && s > 1e-12) ? s : 1.0; }

double Range(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

bool IsGp(const ModelSpec& spec) { return spec.kind != ModelKind::kHillParametric; }

// Transformed + standardized value of a raw stock on channel j.
double TransformInput(const FittedModel& m, std::size_t j, double stock) {
  double v = stock;
  if (m.spec.log_inputs) v = std::log(std::max(stock, m.spec.log_floor));
  return (v - m.x_std[j].location) / m.x_std[j].scale;
}

enum class Coord { kInput, kTime };

struct Term {
  kernels::Kernel kernel;
  Coord coord;
  std::size_t channel = 0;  // for kInput and time-varying channel terms
  bool scaled = false;      // ScaledTime channel term
};

std::vector<Term> Terms(const FittedModel& m, std::span<const double> v) {
  std::vector<Term> terms;
  std::size_t p = 0;
  for (std::size_t j = 0; j < m.num_channels(); ++j) {
    const kernels::SEHyper se{v[p], v[p + 1]};
    p += 2;
    if (m.spec.time_varying()) {
      auto series = std::make_shared<const kernels::ScaleSeries>(m.periods.front(), m.inputs[j]);
      terms.push_back({kernels::Kernel::MakeScaledTime(se, series), Coord::kTime, j, true});
    } else {
      terms.push_back({kernels::Kernel{se}, Coord::kInput, j, false});
    }
  }
  if (m.spec.intercept == InterceptKind::kTrendSeason) {
    const kernels::SEHyper trend{v[p], v[p + 1]};
    const kernels::PeriodicHyper season{v[p + 2], v[p + 3], m.spec.season_cycle};
    terms.push_back({kernels::Kernel::MakeTrendSeason(trend, season), Coord::kTime, 0, false});
  }
  return terms;
}

std::vector<double> Times(const std::vector<int>& periods) {
  return std::vector<double>(periods.begin(), periods.end());
}

Eigen::MatrixXd TotalGram(const FittedModel& m, std::span<const double> v) {
  const auto n = static_cast<Eigen::Index>(m.periods.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  const std::vector<double> times = Times(m.periods);
  for (const Term& term : Terms(m, v)) {
    if (term.coord == Coord::kInput)
      k += kernels::Gram(term.kernel, m.inputs[term.channel]);
    else
      k += kernels::Gram(term.kernel, times);
  }
  return k;
}

gp::HyperFamily MakeFamily(const FittedModel& m) {
  gp::HyperFamily family;
  const double t_range = std::max(1.0, Range(Times(m.periods)));
  auto add = [&](const std::string& name, double lo, double hi, double median) {
    family.params.push_back({name, lo, hi, median, 1.0});
  };
  for (std::size_t j = 0; j < m.num_channels(); ++j) {
    const std::string& name = m.data.channels[j].name;
    const double range = m.spec.time_varying() ? t_range : Range(m.inputs[j]);
    const double r = range > 1e-12 ? range : 1.0;
    add("eta_" + name, 1e-3, 1e3, 1.0);
    add("rho_" + name, 1e-2 * r, 1e1 * r, 0.25 * r);
  }
  if (m.spec.intercept == InterceptKind::kTrendSeason) {
    add("eta_trend", 1e-3, 1e3, 1.0);
    add("rho_trend", 1e-2 * t_range, 1e1 * t_range, 0.25 * t_range);
    add("eta_season", 1e-3, 1e3, 1.0);
    add("rho_season", 0.1, 10.0, 1.0);
  }
  add("sigma", 1e-4, 1e1, 0.25);
  family.targets = m.target;
  family.basis = m.basis;
  const FittedModel* mp = &m;
  family.covariance = [mp](std::span<const double> v) { return TotalGram(*mp, v); };
  return family;
}

FittedModel Prepare(const Dataset& data, const ModelSpec& spec) {
  spec.Validate();
  data.Validate();
  if (data.num_channels() == 0) throw DomainError("the model needs at least one spend channel");
  if (spec.kind == ModelKind::kHillParametric && data.num_channels() != 1)
    throw DomainError("the Hill model takes exactly one channel");
  if (data.signed_spend && (spec.log_inputs || spec.kind == ModelKind::kHillParametric))
    throw DomainError("log inputs and the Hill model need nonnegative spend");

  FittedModel m;
  m.spec = spec;
  m.data = data;
  const std::size_t lags = spec.carryover ? static_cast<std::size_t>(spec.carryover->lags) : 0;
  if (data.size() < lags + 10) {
    std::ostringstream os;
    os << "insufficient data: " << (data.size() > lags ? data.size() - lags : 0)
       << " usable periods after carryover trimming, need at least 10";
    throw FitError(os.str());
  }
  m.periods.assign(data.periods.begin() + static_cast<std::ptrdiff_t>(lags), data.periods.end());
  m.outcome.assign(data.outcome.begin() + static_cast<std::ptrdiff_t>(lags), data.outcome.end());
  const std::size_t n = m.periods.size();

  for (const Column& c : data.channels) {
    if (spec.carryover)
      m.stock.push_back(transforms::Adstock(c.values, *spec.carryover).values);
    else
      m.stock.push_back(c.values);
  }

  // Outcome transform and standardization.
  std::vector<double> y = m.outcome;
  if (spec.log_outcome) {
    auto g = transforms::LogGuard(y, spec.log_floor);
    if (g.floored_count > 0)
      m.notes.push_back(std::to_string(g.floored_count) + " outcome values floored before log");
    y = std::move(g.values);
  }
  if (IsGp(spec)) {
    if (spec.intercept == InterceptKind::kNone)
      m.y_std = {0.0, SafeScale(Rms(y))};
    else
      m.y_std = {Mean(y), SafeScale(Sd(y))};
  }
  m.target.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    m.target[static_cast<Eigen::Index>(i)] = (y[i] - m.y_std.location) / m.y_std.scale;

  // Input transform and standardization. Level time-varying inputs are only
  // rescaled so that zero spend stays zero.
  for (std::size_t j = 0; j < m.stock.size(); ++j) {
    std::vector<double> u = m.stock[j];
    if (spec.log_inputs) {
      auto g = transforms::LogGuard(u, spec.log_floor);
      if (g.floored_count > 0)
        m.notes.push_back(std::to_string(g.floored_count) + " values of " + data.channels[j].name +
                          " floored before log");
      u = std::move(g.values);
    }
    Standardization s;
    if (spec.kind == ModelKind::kTimeVaryingGP)
      s = {0.0, SafeScale(Rms(u))};
    else if (IsGp(spec))
      s = {Mean(u), SafeScale(Sd(u))};
    for (double& x : u) x = (x - s.location) / s.scale;
    m.x_std.push_back(s);
    m.inputs.push_back(std::move(u));
  }

  // Fixed effects.
  std::vector<const Column*> dummies;
  for (const std::string& name : spec.dummies) {
    auto it = std::find_if(data.dummies.begin(), data.dummies.end(),
                           [&](const Column& c) { return c.name == name; });
    if (it == data.dummies.end()) throw SchemaError("unknown dummy column '" + name + "'");
    dummies.push_back(&*it);
  }
  const bool constant = spec.intercept != InterceptKind::kNone;
  const auto p = static_cast<Eigen::Index>(dummies.size() + (constant ? 1 : 0));
  m.basis.resize(static_cast<Eigen::Index>(n), p);
  Eigen::Index col = 0;
  if (constant) {
    m.basis.col(col++).setOnes();
    m.basis_names.push_back("intercept");
  }
  for (const Column* c : dummies) {
    for (std::size_t i = 0; i < n; ++i)
      m.basis(static_cast<Eigen::Index>(i), col) = c->values[i + lags];
    ++col;
    m.basis_names.push_back(c->name);
  }
  return m;
}

// Hill: linear least squares for the fixed effects and amplitude given (k, s).
struct HillSolve {
  Eigen::VectorXd coefficients;  // basis columns then amplitude
  double rss = 0.0;
};

HillSolve SolveHillLinear(const FittedModel& m, double k, double s) {
  const auto n = m.target.size();
  Eigen::MatrixXd design(n, m.basis.cols() + 1);
  design.leftCols(m.basis.cols()) = m.basis;
  for (Eigen::Index i = 0; i < n; ++i)
    design(i, m.basis.cols()) = transforms::Hill(m.stock[0][static_cast<std::size_t>(i)], {k, s});
  HillSolve out;
  out.coefficients = design.colPivHouseholderQr().solve(m.target);
  out.rss = (design * out.coefficients - m.target).squaredNorm();
  return out;
}

HillEstimate FitHill(const FittedModel& m, std::uint64_t seed) {
  const double range = Range(m.stock[0]);
  if (!(range > 0.0)) throw FitError("the Hill model needs spend variation");
  const std::vector<double> lo = {std::log(1e-3 * range), std::log(0.05)};
  const std::vector<double> hi = {std::log(1e3 * range), std::log(20.0)};
  auto objective = [&](std::span<const double> v) {
    const HillSolve r = SolveHillLinear(m, std::exp(v[0]), std::exp(v[1]));
    return std::isfinite(r.rss) ? r.rss : std::numeric_limits<double>::infinity();
  };
  std::vector<double> sorted = m.stock[0];
  std::sort(sorted.begin(), sorted.end());
  const double median = std::max(sorted[sorted.size() / 2], 1e-3 * range);

  SimplexOptions options;
  options.max_evaluations = 1500;
  options.x_tolerance = 1e-7;
  options.f_tolerance = 1e-14;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  const int restarts = std::max(1, m.spec.inference.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> start = {std::log(median), 0.0};
    if (r > 0) {
      Rng rng = MakeRng(DeriveSeed(seed, {static_cast<std::uint64_t>(r)}));
      start[0] = std::uniform_real_distribution<double>(std::log(0.1 * range), std::log(3.0 * range))(rng);
      start[1] = std::uniform_real_distribution<double>(std::log(0.3), std::log(5.0))(rng);
    }
    // A second pass from the first optimum polishes collapsed simplices.
    SimplexResult res = MinimizeSimplex(objective, start, lo, hi, options);
    res = MinimizeSimplex(objective, res.x, lo, hi, options);
    if (std::isfinite(res.value) && res.value < best) {
      best = res.value;
      best_x = res.x;
    }
  }
  if (best_x.empty()) throw FitError("Hill least squares did not converge after restarts");
  HillEstimate h;
  h.k = std::exp(best_x[0]);
  h.s = std::exp(best_x[1]);
  const HillSolve r = SolveHillLinear(m, h.k, h.s);
  const auto p = m.basis.cols();
  h.coefficients.assign(r.coefficients.data(), r.coefficients.data() + p);
  h.amplitude = r.coefficients[p];
  h.rss = r.rss;
  const double dof = std::max<double>(1.0, static_cast<double>(m.target.size() - p - 3));
  h.sigma = std::sqrt(r.rss / dof);
  return h;
}

void Assemble(FittedModel& m) {
  m.posteriors.clear();
  if (!IsGp(m.spec)) return;
  for (const auto& draw : m.hypers.draws) {
    if (draw.size() != m.param_names.size())
      throw DomainError("hyperparameter draw has the wrong length");
    const std::span<const double> v(draw);
    m.posteriors.emplace_back(TotalGram(m, v.first(v.size() - 1)), draw.back(), m.target, m.basis);
  }
}

struct Query {
  std::vector<double> time;       // actual periods
  std::vector<double> beta_time;  // time coordinate of beta terms
  std::vector<std::vector<double>> u;  // transformed inputs per channel
  Eigen::MatrixXd basis;
};

Query MakeQuery(const FittedModel& m, const std::vector<int>& periods,
                const std::vector<std::vector<double>>& stock, const PredictOptions& options) {
  const std::size_t q = periods.size();
  if (stock.size() != m.num_channels()) throw DomainError("spend must be given for every channel");
  for (const auto& s : stock)
    if (s.size() != q) throw DomainError("spend must cover every query period");
  Query out;
  const double last = m.last_period();
  for (int p : periods) {
    out.time.push_back(p);
    out.beta_time.push_back(options.beta == BetaExtrapolation::kFrozen ? std::min<double>(p, last) : p);
  }
  for (std::size_t j = 0; j < stock.size(); ++j) {
    std::vector<double> u(q);
    for (std::size_t i = 0; i < q; ++i) {
      if (!std::isfinite(stock[j][i]) || (!m.data.signed_spend && stock[j][i] < 0.0))
        throw DomainError("spend must be finite and nonnegative");
      u[i] = m.spec.kind == ModelKind::kHillParametric ? stock[j][i] : TransformInput(m, j, stock[j][i]);
    }
    out.u.push_back(std::move(u));
  }
  const std::size_t num_dummies = m.spec.dummies.size();
  if (!options.dummies.empty() && options.dummies.size() != num_dummies)
    throw DomainError("dummy values must be given for every dummy column");
  out.basis.resize(static_cast<Eigen::Index>(q), m.basis.cols());
  for (std::size_t i = 0; i < q; ++i) {
    Eigen::Index c = 0;
    if (m.spec.intercept != InterceptKind::kNone) out.basis(static_cast<Eigen::Index>(i), c++) = 1.0;
    for (std::size_t d = 0; d < num_dummies; ++d) {
      double v = 0.0;
      if (!options.dummies.empty()) {
        if (options.dummies[d].size() != q) throw DomainError("dummy values must cover every query period");
        v = options.dummies[d][i];
      }
      out.basis(static_cast<Eigen::Index>(i), c++) = v;
    }
  }
  return out;
}

// Cross covariance (Q x T) and prior variances of one term at the query.
void TermCross(const FittedModel& m, const Term& term, const Query& q,
               const std::vector<double>& times, Eigen::MatrixXd& cross, Eigen::VectorXd& prior) {
  const auto nq = static_cast<Eigen::Index>(q.time.size());
  if (term.coord == Coord::kInput) {
    cross += kernels::Cross(term.kernel, q.u[term.channel], m.inputs[term.channel]);
    for (Eigen::Index i = 0; i < nq; ++i)
      prior[i] += kernels::Variance(term.kernel, q.u[term.channel][static_cast<std::size_t>(i)]);
  } else if (term.scaled) {
    const std::span<const double> scale(q.u[term.channel]);
    cross += kernels::Cross(term.kernel, q.beta_time, times, scale);
    for (Eigen::Index i = 0; i < nq; ++i)
      prior[i] += kernels::Variance(term.kernel, q.beta_time[static_cast<std::size_t>(i)],
                                    scale[static_cast<std::size_t>(i)]);
  } else {
    cross += kernels::Cross(term.kernel, q.time, times);
    for (Eigen::Index i = 0; i < nq; ++i)
      prior[i] += kernels::Variance(term.kernel, q.time[static_cast<std::size_t>(i)]);
  }
}

// Prior covariance of one term among the query points.
Eigen::MatrixXd TermPriorCov(const Term& term, const Query& q) {
  if (term.coord == Coord::kInput) return kernels::Cross(term.kernel, q.u[term.channel], q.u[term.channel]);
  if (term.scaled) {
    const kernels::Kernel se{std::get<kernels::ScaledTime>(term.kernel.variant).se};
    const Eigen::Map<const Eigen::VectorXd> u(q.u[term.channel].data(),
                                              static_cast<Eigen::Index>(q.u[term.channel].size()));
    return kernels::Cross(se, q.beta_time, q.beta_time).cwiseProduct(u * u.transpose());
  }
  return kernels::Cross(term.kernel, q.time, q.time);
}

Prediction Run(const FittedModel& m, const std::vector<int>& periods,
               const std::vector<std::vector<double>>& stock, const PredictOptions& options) {
  const Query q = MakeQuery(m, periods, stock, options);
  const auto nq = static_cast<Eigen::Index>(periods.size());
  Prediction out;
  out.periods = periods;
  out.extrapolated.assign(periods.size(), false);
  for (std::size_t j = 0; j < stock.size(); ++j) {
    const auto [lo, hi] = std::minmax_element(m.stock[j].begin(), m.stock[j].end());
    for (std::size_t i = 0; i < periods.size(); ++i)
      if (stock[j][i] < *lo || stock[j][i] > *hi) out.extrapolated[i] = true;
  }

  if (!IsGp(m.spec)) {
    const HillEstimate& h = *m.hill;
    Eigen::VectorXd mean(nq);
    for (Eigen::Index i = 0; i < nq; ++i) {
      double v = h.amplitude * transforms::Hill(stock[0][static_cast<std::size_t>(i)], {h.k, h.s});
      for (Eigen::Index c = 0; c < q.basis.cols(); ++c)
        v += h.coefficients[static_cast<std::size_t>(c)] * q.basis(i, c);
      mean[i] = v;
    }
    out.mean = mean;
    out.variance = Eigen::VectorXd::Zero(nq);
    out.noisy_variance = Eigen::VectorXd::Constant(nq, h.sigma * h.sigma);
    out.draw_means = {mean};
    out.latent_draws.assign(static_cast<std::size_t>(std::max(0, options.latent_draws)), mean);
  } else {
    const std::vector<double> times = Times(m.periods);
    const double a = m.y_std.location;
    const double s = m.y_std.scale;
    Eigen::VectorXd sum_mean = Eigen::VectorXd::Zero(nq);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(nq);
    Eigen::VectorXd sum_var = Eigen::VectorXd::Zero(nq);
    Eigen::VectorXd sum_noise = Eigen::VectorXd::Zero(nq);
    for (std::size_t d = 0; d < m.posteriors.size(); ++d) {
      const auto& draw = m.hypers.draws[d];
      Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(nq, static_cast<Eigen::Index>(times.size()));
      Eigen::VectorXd prior = Eigen::VectorXd::Zero(nq);
      for (const Term& term : Terms(m, draw)) TermCross(m, term, q, times, cross, prior);
      const gp::PredictiveMoments mom = m.posteriors[d].Predict(cross, prior, q.basis);
      const Eigen::VectorXd mean = (a + s * mom.mean.array()).matrix();
      if (options.latent_draws > 0) {
        const auto nd = static_cast<int>(m.posteriors.size());
        const int count = options.latent_draws / nd + (static_cast<int>(d) < options.latent_draws % nd ? 1 : 0);
        if (count > 0) {
          Eigen::MatrixXd prior_cov = Eigen::MatrixXd::Zero(nq, nq);
          for (const Term& term : Terms(m, draw)) prior_cov += TermPriorCov(term, q);
          const Eigen::MatrixXd cov = m.posteriors[d].PredictCovariance(cross, prior_cov, q.basis);
          const Eigen::MatrixXd l = kernels::StableCholesky(cov, true, "predictive covariance").lower;
          Rng rng = MakeRng(DeriveSeed(options.draw_seed, {d}));
          std::normal_distribution<double> normal;
          for (int k = 0; k < count; ++k) {
            Eigen::VectorXd z(nq);
            for (Eigen::Index i = 0; i < nq; ++i) z[i] = normal(rng);
            out.latent_draws.push_back(mean + s * (l * z));
          }
        }
      }
      out.draw_means.push_back(mean);
      sum_mean += mean;
      sum_sq += mean.cwiseProduct(mean);
      sum_var += s * s * mom.variance;
      sum_noise += s * s * (mom.noisy_variance - mom.variance);
    }
    const double nd = static_cast<double>(m.posteriors.size());
    out.mean = sum_mean / nd;
    const Eigen::VectorXd between =
        (sum_sq / nd - out.mean.cwiseProduct(out.mean)).cwiseMax(0.0);
    out.variance = sum_var / nd + between;
    out.noisy_variance = out.variance + sum_noise / nd;
  }
  out.outcome = m.spec.log_outcome ? Eigen::VectorXd(out.mean.array().exp()) : out.mean;
  return out;
}

struct Moments {
  std::vector<double> mean;
  std::vector<double> var;
};

// Posterior of one latent term at custom query coordinates, mixed over draws,
// in standardized units. `build` gives the term's cross covariance and prior
// variances for a draw.
template <typename Build>
Moments TermMoments(const FittedModel& m, std::size_t nq, Build build) {
  std::vector<double> sum(nq, 0.0), sq(nq, 0.0), var(nq, 0.0);
  for (std::size_t d = 0; d < m.posteriors.size(); ++d) {
    Eigen::MatrixXd cross;
    Eigen::VectorXd prior;
    build(m.hypers.draws[d], cross, prior);
    const gp::GpPosterior& post = m.posteriors[d];
    const Eigen::VectorXd mean = cross * post.weights();
    const Eigen::MatrixXd v = post.lower().triangularView<Eigen::Lower>().solve(cross.transpose());
    const Eigen::VectorXd reduce = v.colwise().squaredNorm().transpose();
    for (std::size_t i = 0; i < nq; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      sum[i] += mean[ii];
      sq[i] += mean[ii] * mean[ii];
      var[i] += std::max(0.0, prior[ii] - reduce[ii]);
    }
  }
  const double nd = static_cast<double>(m.posteriors.size());
  Moments out{std::vector<double>(nq), std::vector<double>(nq)};
  for (std::size_t i = 0; i < nq; ++i) {
    out.mean[i] = sum[i] / nd;
    out.var[i] = var[i] / nd + std::max(0.0, sq[i] / nd - out.mean[i] * out.mean[i]);
  }
  return out;
}

ComponentCurve MakeCurve(std::string name, std::string kind, std::vector<double> grid,
                         const Moments& mom, double offset, double scale) {
  ComponentCurve c{std::move(name), std::move(kind), std::move(grid), {}, {}, {}};
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const double mean = offset + scale * mom.mean[i];
    const double half = kZ95 * std::abs(scale) * std::sqrt(mom.var[i]);
    c.mean.push_back(mean);
    c.lower.push_back(mean - half);
    c.upper.push_back(mean + half);
  }
  return c;
}

Moments BetaMoments(const FittedModel& m, std::size_t j, const std::vector<double>& coord) {
  const std::vector<double> times = Times(m.periods);
  const std::vector<double> ones(coord.size(), 1.0);
  return TermMoments(m, coord.size(), [&](const std::vector<double>& draw, Eigen::MatrixXd& cross,
                                          Eigen::VectorXd& prior) {
    const Term term = Terms(m, draw)[j];
    cross = kernels::Cross(term.kernel, coord, times, std::span<const double>(ones));
    prior.resize(static_cast<Eigen::Index>(coord.size()));
    for (std::size_t i = 0; i < coord.size(); ++i)
      prior[static_cast<Eigen::Index>(i)] = kernels::Variance(term.kernel, coord[i], 1.0);
  });
}

}  // namespace

const char* ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kNonlinearGP: return "nonlinear_gp";
    case ModelKind::kTimeVaryingGP: return "time_varying_gp";
    case ModelKind::kHillParametric: return "hill";
    case ModelKind::kLogTimeVarying: return "log_time_varying";
  }
  return "?";
}

ModelKind ModelKindFromString(const std::string& s) {
  for (ModelKind k : {ModelKind::kNonlinearGP, ModelKind::kTimeVaryingGP,
                      ModelKind::kHillParametric, ModelKind::kLogTimeVarying})
    if (s == ToString(k)) return k;
  throw SchemaError("unknown model kind '" + s + "'");
}

const char* ToString(InterceptKind kind) {
  switch (kind) {
    case InterceptKind::kNone: return "none";
    case InterceptKind::kConstant: return "constant";
    case InterceptKind::kTrendSeason: return "trend_season";
  }
  return "?";
}

InterceptKind InterceptKindFromString(const std::string& s) {
  for (InterceptKind k : {InterceptKind::kNone, InterceptKind::kConstant, InterceptKind::kTrendSeason})
    if (s == ToString(k)) return k;
  throw SchemaError("unknown intercept kind '" + s + "'");
}

void ModelSpec::Validate() const {
  if (kind == ModelKind::kLogTimeVarying && !(log_inputs && log_outcome))
    throw DomainError("log_time_varying requires logged inputs and outcome");
  if (kind == ModelKind::kHillParametric && log_inputs)
    throw DomainError("the Hill model takes spend in levels");
  if (!(log_floor > 0.0)) throw DomainError("log floor must be positive");
  if (!(season_cycle > 0.0)) throw DomainError("season cycle must be positive");
  if (inference.restarts < 1) throw DomainError("restarts must be at least 1");
  if (carryover) transforms::Validate(*carryover);
}

ModelSpec NonlinearSpec() { return ModelSpec{}; }

ModelSpec TimeVaryingSpec() {
  ModelSpec s;
  s.kind = ModelKind::kTimeVaryingGP;
  return s;
}

ModelSpec LogTimeVaryingSpec() {
  ModelSpec s;
  s.kind = ModelKind::kLogTimeVarying;
  s.log_inputs = true;
  s.log_outcome = true;
  return s;
}

ModelSpec HillSpec() {
  ModelSpec s;
  s.kind = ModelKind::kHillParametric;
  return s;
}

FittedModel Fit(const Dataset& data, const ModelSpec& spec, std::uint64_t seed) {
  FittedModel m = Prepare(data, spec);
  if (!IsGp(spec)) {
    m.hill = FitHill(m, DeriveSeed(seed, {3}));
    m.hypers.draws = {{m.hill->k, m.hill->s, m.hill->sigma}};
    m.param_names = {"k", "s", "sigma"};
    return m;
  }
  const gp::HyperFamily family = MakeFamily(m);
  for (const auto& p : family.params) m.param_names.push_back(p.name);
  const gp::PointFit point = gp::FitPoint(family, spec.inference.restarts, DeriveSeed(seed, {1}));
  if (point.failed_restarts > 0)
    m.notes.push_back(std::to_string(point.failed_restarts) + " point-fit restarts failed");
  if (spec.inference.mode == InferenceMode::kPoint) {
    m.hypers.draws = {point.values};
    m.hypers.provenance = gp::HyperDraws::Provenance::kPointEstimate;
  } else {
    m.hypers = gp::FitMetropolis(
        family.params,
        [&family](std::span<const double> v) { return gp::FamilyLogLikelihood(family, v); },
        spec.inference.chain, DeriveSeed(seed, {2}), point.values);
  }
  Assemble(m);
  return m;
}

FittedModel Rebuild(const Dataset& data, const ModelSpec& spec, const gp::HyperDraws& hypers,
                    const std::optional<HillEstimate>& hill) {
  FittedModel m = Prepare(data, spec);
  m.hypers = hypers;
  if (!IsGp(spec)) {
    if (!hill) throw DomainError("a Hill model needs its parameter estimate");
    m.hill = hill;
    m.param_names = {"k", "s", "sigma"};
    return m;
  }
  if (hypers.draws.empty()) throw DomainError("no hyperparameter draws to rebuild from");
  for (const auto& p : MakeFamily(m).params) m.param_names.push_back(p.name);
  Assemble(m);
  return m;
}

Prediction Predict(const FittedModel& model, const std::vector<int>& periods,
                   const std::vector<std::vector<double>>& spend, const PredictOptions& options) {
  if (periods.empty()) throw DomainError("no horizon periods");
  const int last = model.data.periods.back();
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] <= last)
      throw DomainError("horizon period " + std::to_string(periods[i]) +
                        " is not after the training end " + std::to_string(last));
    if (model.spec.carryover && model.spec.carryover->lags > 0 &&
        periods[i] != last + 1 + static_cast<int>(i))
      throw DomainError("with carryover the horizon must continue the training periods");
  }
  if (spend.size() != model.num_channels()) throw DomainError("spend must be given for every channel");
  if (!model.spec.carryover) return Run(model, periods, spend, options);

  std::vector<std::vector<double>> stock;
  for (std::size_t j = 0; j < spend.size(); ++j) {
    if (spend[j].size() != periods.size()) throw DomainError("spend must cover every horizon period");
    std::vector<double> history = model.data.channels[j].values;
    history.insert(history.end(), spend[j].begin(), spend[j].end());
    const auto series = transforms::Adstock(history, *model.spec.carryover);
    stock.emplace_back(series.values.end() - static_cast<std::ptrdiff_t>(periods.size()),
                       series.values.end());
  }
  return Run(model, periods, stock, options);
}

Prediction PredictAtStock(const FittedModel& model, const std::vector<int>& periods,
                          const std::vector<std::vector<double>>& stock,
                          const PredictOptions& options) {
  if (periods.empty()) throw DomainError("no query periods");
  return Run(model, periods, stock, options);
}

Prediction Fitted(const FittedModel& model) {
  PredictOptions options;
  const std::size_t lags = model.data.size() - model.periods.size();
  for (const std::string& name : model.spec.dummies) {
    const Column* c = nullptr;
    for (const Column& d : model.data.dummies)
      if (d.name == name) c = &d;
    options.dummies.emplace_back(c->values.begin() + static_cast<std::ptrdiff_t>(lags), c->values.end());
  }
  return Run(model, model.periods, model.stock, options);
}

std::vector<ComponentCurve> Components(const FittedModel& model, const ComponentGrid& grid) {
  std::vector<ComponentCurve> out;
  const std::vector<int> period_grid = grid.periods.empty() ? model.periods : grid.periods;
  const std::vector<double> pgrid(period_grid.begin(), period_grid.end());
  const double sy = model.y_std.scale;

  for (std::size_t j = 0; j < model.num_channels(); ++j) {
    const std::string& name = model.data.channels[j].name;
    if (model.spec.time_varying()) {
      const Moments mom = BetaMoments(model, j, pgrid);
      out.push_back(MakeCurve(name, "beta", pgrid, mom, 0.0, sy / model.x_std[j].scale));
      continue;
    }
    std::vector<double> g;
    if (j < grid.spend.size() && !grid.spend[j].empty()) {
      g = grid.spend[j];
      std::sort(g.begin(), g.end());
    } else {
      const auto [lo, hi] = std::minmax_element(model.stock[j].begin(), model.stock[j].end());
      const int n = std::max(2, grid.default_points);
      for (int i = 0; i < n; ++i) g.push_back(*lo + (*hi - *lo) * i / (n - 1));
    }
    ComponentCurve c;
    if (!IsGp(model.spec)) {
      const HillEstimate& h = *model.hill;
      c = {name, "f", g, {}, {}, {}};
      for (double x : g) c.mean.push_back(h.amplitude * transforms::Hill(x, {h.k, h.s}));
      c.lower = c.mean;
      c.upper = c.mean;
    } else {
      std::vector<double> u;
      for (double x : g) u.push_back(TransformInput(model, j, x));
      const Moments mom = TermMoments(model, u.size(), [&](const std::vector<double>& draw,
                                                           Eigen::MatrixXd& cross,
                                                           Eigen::VectorXd& prior) {
        const Term term = Terms(model, draw)[j];
        cross = kernels::Cross(term.kernel, u, model.inputs[j]);
        prior.resize(static_cast<Eigen::Index>(u.size()));
        for (std::size_t i = 0; i < u.size(); ++i)
          prior[static_cast<Eigen::Index>(i)] = kernels::Variance(term.kernel, u[i]);
      });
      c = MakeCurve(name, "f", g, mom, 0.0, sy);
    }
    if (grid.rebase) {
      const double base = c.mean.front();
      for (std::size_t i = 0; i < c.grid.size(); ++i) {
        c.mean[i] -= base;
        c.lower[i] -= base;
        c.upper[i] -= base;
      }
    }
    out.push_back(std::move(c));
  }

  // Intercept: location plus the constant fixed effect plus the trend-season term.
  double constant = 0.0;
  if (model.spec.intercept != InterceptKind::kNone) {
    if (IsGp(model.spec)) {
      for (const auto& post : model.posteriors) constant += post.coefficients()[0];
      constant /= static_cast<double>(model.posteriors.size());
    } else {
      constant = model.hill->coefficients[0];
    }
  }
  if (IsGp(model.spec) && model.spec.intercept == InterceptKind::kTrendSeason) {
    const std::vector<double> times = Times(model.periods);
    const std::size_t ts = model.num_channels();
    const Moments mom = TermMoments(model, pgrid.size(), [&](const std::vector<double>& draw,
                                                             Eigen::MatrixXd& cross,
                                                             Eigen::VectorXd& prior) {
      const Term term = Terms(model, draw)[ts];
      cross = kernels::Cross(term.kernel, pgrid, times);
      prior.resize(static_cast<Eigen::Index>(pgrid.size()));
      for (std::size_t i = 0; i < pgrid.size(); ++i)
        prior[static_cast<Eigen::Index>(i)] = kernels::Variance(term.kernel, pgrid[i]);
    });
    out.push_back(MakeCurve("intercept", "intercept", pgrid, mom,
                            model.y_std.location + sy * constant, sy));
  } else {
    const double level = IsGp(model.spec) ? model.y_std.location + sy * constant : constant;
    ComponentCurve c{"intercept", "intercept", pgrid, std::vector<double>(pgrid.size(), level), {}, {}};
    c.lower = c.mean;
    c.upper = c.mean;
    out.push_back(std::move(c));
  }
  return out;
}

Elasticity ElasticityAt(const FittedModel& model, int period, std::size_t channel,
                        BetaExtrapolation mode) {
  if (model.spec.kind != ModelKind::kLogTimeVarying)
    throw DomainError("elasticity needs a log-log time-varying model");
  if (channel >= model.num_channels()) throw DomainError("channel index out of range");
  const double t = (mode == BetaExtrapolation::kFrozen) ? std::min(period, model.last_period()) : period;
  const Moments mom = BetaMoments(model, channel, {t});
  const double scale = model.y_std.scale / model.x_std[channel].scale;
  Elasticity e;
  e.mean = scale * mom.mean[0];
  e.sd = std::abs(scale) * std::sqrt(mom.var[0]);
  e.lower = e.mean - kZ95 * e.sd;
  e.upper = e.mean + kZ95 * e.sd;
  return e;
}

double LogLinearIntercept(const FittedModel& model, int period, BetaExtrapolation mode) {
  if (model.spec.kind != ModelKind::kLogTimeVarying)
    throw DomainError("the log-linear intercept needs a log-log time-varying model");
  PredictOptions options;
  options.beta = mode;
  const std::vector<std::vector<double>> unit(model.num_channels(), std::vector<double>{1.0});
  return PredictAtStock(model, {period}, unit, options).mean[0];
}

double TrainingR2(const FittedModel& model) {
  const Prediction p = Fitted(model);
  const double m = Mean(model.outcome);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < model.outcome.size(); ++i) {
    const double r = model.outcome[i] - p.outcome[static_cast<Eigen::Index>(i)];
    ss_res += r * r;
    ss_tot += (model.outcome[i] - m) * (model.outcome[i] - m);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
}

}  // namespace gpmmm::mmm
