// Copyright 2026 The DBF Racing Authors
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

#include "dbf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <thread>

#include "dbf/errors.hpp"

namespace dbf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FactorStats factor_stats(std::vector<double> values) {
  FactorStats s;
  if (values.empty()) return s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  s.median = *mid;
  return s;
}

nlohmann::json stats_json(const FactorStats& s) { return {{"min", s.min}, {"median", s.median}, {"max", s.max}}; }

struct SampleOutcome {
  CurveViolations violations;
  Likelihood lik;
};

}  // namespace

void DbfConfig::validate() const {
  if (!(beta1 > 0.0 && beta2 > 0.0 && beta3 > 0.0)) throw ValidationError("dbf betas must be > 0");
  if (!std::isfinite(d_min)) throw ValidationError("dbf d_min must be finite");
  if (n_samples < 2) throw ValidationError("dbf n_samples must be >= 2");
  if (n_iterations < 1) throw ValidationError("dbf n_iterations must be >= 1");
  if (curve_samples < 16) throw ValidationError("dbf curve_samples must be >= 16");
  if (!(a_c_max > 0.0)) throw ValidationError("dbf a_c_max must be > 0");
  if (!(speed_scale > 0.0)) throw ValidationError("dbf speed_scale must be > 0");
  if (!(prior_variance >= 0.0) || !std::isfinite(prior_variance))
    throw ValidationError("dbf prior_variance must be finite and >= 0");
  if (!(tolerance >= 0.0)) throw ValidationError("dbf tolerance must be >= 0");
  if (workers < 1) throw ValidationError("dbf workers must be >= 1");
  if (pinned_points < 1) throw ValidationError("dbf pinned_points must be >= 1");
}

CurveViolations curve_violations(const CurveSampler& sampler, CurveKinematics& k, const BezierCurve& curve,
                                 const Evidence& ev) {
  sampler.evaluate(curve, k);
  CurveViolations v;
  v.delta_a_c = -kInf;
  v.delta_a_l = -kInf;
  v.distance = -kInf;
  for (int j = 0; j < k.samples; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double speed = k.speed[u];
    if (!(speed > kDegenerateSpeed)) {
      v.degenerate = true;
    } else {
      v.delta_a_c = std::max(v.delta_a_c, k.a_cent[u] - ev.a_c_max);
      const double al = k.a_long[u];
      v.delta_a_l = std::max(v.delta_a_l, std::max(al - ev.envelope.a_max(speed), ev.envelope.a_min(speed) - al));
    }
    v.distance = std::max(v.distance, ev.track.signed_distance(Vec2(k.x[u], k.y[u])));
  }
  if (v.degenerate) {
    v.delta_a_c = kInf;
    v.delta_a_l = kInf;
  }
  return v;
}

double delta_a_c(const BezierCurve& curve, double a_c_max, int samples) {
  if (samples < 16) throw DomainError("delta_a_c needs at least 16 samples");
  const CurveSampler sampler(curve.order(), samples);
  CurveKinematics k;
  sampler.evaluate(curve, k);
  double worst = -kInf;
  for (int j = 0; j < samples; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (!(k.speed[u] > kDegenerateSpeed)) return kInf;
    worst = std::max(worst, k.a_cent[u] - a_c_max);
  }
  return worst;
}

double delta_a_l(const BezierCurve& curve, const AccelEnvelope& envelope, int samples) {
  if (samples < 16) throw DomainError("delta_a_l needs at least 16 samples");
  const CurveSampler sampler(curve.order(), samples);
  CurveKinematics k;
  sampler.evaluate(curve, k);
  double worst = -kInf;
  for (int j = 0; j < samples; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double speed = k.speed[u];
    if (!(speed > kDegenerateSpeed)) return kInf;
    const double al = k.a_long[u];
    worst = std::max(worst, std::max(al - envelope.a_max(speed), envelope.a_min(speed) - al));
  }
  return worst;
}

Likelihood likelihood_from_violations(const CurveViolations& v, const DbfConfig& cfg, double d_min) {
  Likelihood out;
  if (v.degenerate) {
    out.l1 = out.l2 = 0.0;
    out.product = std::numeric_limits<double>::denorm_min();
    out.log_product = std::log(out.product);
    out.l3 = v.distance > d_min ? std::exp(-cfg.beta3 * (v.distance - d_min)) : 1.0;
    return out;
  }
  const double e1 = v.delta_a_c > 0.0 ? cfg.beta1 * v.delta_a_c : 0.0;
  const double e2 = v.delta_a_l > 0.0 ? cfg.beta2 * v.delta_a_l : 0.0;
  const double e3 = v.distance > d_min ? cfg.beta3 * (v.distance - d_min) : 0.0;
  out.l1 = e1 > 0.0 ? std::exp(-e1) : 1.0;
  out.l2 = e2 > 0.0 ? std::exp(-e2) : 1.0;
  out.l3 = e3 > 0.0 ? std::exp(-e3) : 1.0;
  out.log_product = -(e1 + e2 + e3);
  out.product = out.l1 * out.l2 * out.l3;
  return out;
}

Likelihood likelihood(const BezierCurve& curve, const Evidence& ev, const DbfConfig& cfg) {
  const CurveSampler sampler(curve.order(), cfg.curve_samples);
  CurveKinematics k;
  return likelihood_from_violations(curve_violations(sampler, k, curve, ev), cfg, ev.d_min);
}

ProbBezierCurve oracle_prior(const RacelineProfile& profile, const Vec2& vehicle_position, const DbfConfig& cfg,
                             double speed_scale, double noise_sigma, RandomStream& rng, double horizon, int order) {
  if (!(noise_sigma >= 0.0)) throw ValidationError("prior noise sigma must be >= 0");
  if (!(speed_scale > 0.0)) throw ValidationError("prior speed scale must be > 0");
  const BezierCurve seg = raceline_segment(profile, vehicle_position, horizon, order);
  std::vector<Vec2> means(seg.control_points().begin(), seg.control_points().end());
  if (noise_sigma > 0.0) {
    for (std::size_t i = 1; i < means.size(); ++i) {
      const double nx = rng.normal();
      const double ny = rng.normal();
      means[i] += noise_sigma * Vec2(nx, ny);
    }
  }
  std::vector<Mat2> covs(means.size(), cfg.prior_variance * Mat2::Identity());
  return ProbBezierCurve(std::move(means), std::move(covs), horizon / speed_scale);
}

ProbBezierCurve oracle_prior(const RacelineProfile& profile, const Vec2& vehicle_position, const DbfConfig& cfg,
                             double noise_sigma, RandomStream& rng) {
  return oracle_prior(profile, vehicle_position, cfg, cfg.speed_scale, noise_sigma, rng);
}

std::string DbfDiagnostics::to_json_line() const {
  nlohmann::json j{{"iteration", iteration},
                   {"ess", ess},
                   {"weight_sum", weight_sum},
                   {"l1", stats_json(l1)},
                   {"l2", stats_json(l2)},
                   {"l3", stats_json(l3)},
                   {"posterior_delta_a_c", posterior.delta_a_c},
                   {"posterior_delta_a_l", posterior.delta_a_l},
                   {"posterior_d", posterior.distance},
                   {"displacement", displacement}};
  return j.dump();
}

DbfStepResult dbf_step(const ProbBezierCurve& prior, const Evidence& ev, const DbfConfig& cfg, RandomStream& rng) {
  cfg.validate();
  const int n = cfg.n_samples;
  const int k = prior.order();
  const auto n_cp = static_cast<std::size_t>(k) + 1;
  const std::uint64_t base = rng.next_u64();
  const CurveSampler sampler(k, cfg.curve_samples);
  if (cfg.pinned_points > k) throw ValidationError("dbf pinned_points must not exceed the curve order");
  const auto n_pin = static_cast<std::size_t>(cfg.pinned_points);
  const auto prior_means = prior.means();

  std::vector<Vec2> thetas(static_cast<std::size_t>(n) * n_cp);
  std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(n));

  auto work = [&](int begin, int end) {
    CurveKinematics scratch;
    for (int i = begin; i < end; ++i) {
      RandomStream stream = RandomStream::substream(base, static_cast<std::uint64_t>(i));
      BezierCurve drawn = sample_curve(prior, stream);
      std::vector<Vec2> cps(drawn.control_points().begin(), drawn.control_points().end());
      std::copy_n(prior_means.begin(), n_pin, cps.begin());
      const BezierCurve curve(cps, prior.delta_t());
      std::copy(cps.begin(), cps.end(), thetas.begin() + static_cast<std::ptrdiff_t>(i * n_cp));
      auto& out = outcomes[static_cast<std::size_t>(i)];
      out.violations = curve_violations(sampler, scratch, curve, ev);
      out.lik = likelihood_from_violations(out.violations, cfg, ev.d_min);
    }
  };

  const int workers = std::min(cfg.workers, n);
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int b = w * chunk;
      const int e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
  }

  double log_max = -kInf;
  for (const auto& o : outcomes) log_max = std::max(log_max, o.lik.log_product);
  if (!std::isfinite(log_max))
    throw SolverError("every sample weight vanished; lower the betas or draw more samples");

  std::vector<double> weights(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(outcomes[static_cast<std::size_t>(i)].lik.log_product - log_max);
    weights[static_cast<std::size_t>(i)] = w;
    total += w;
  }
  double sum = 0.0, sum_sq = 0.0;
  for (auto& w : weights) {
    w /= total;
    sum += w;
    sum_sq += w * w;
  }

  std::vector<Vec2> mean(n_cp, Vec2::Zero());
  for (int i = 0; i < n; ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < n_cp; ++c) mean[c] += w * thetas[static_cast<std::size_t>(i) * n_cp + c];
  }
  std::copy_n(prior_means.begin(), n_pin, mean.begin());

  DbfDiagnostics diag;
  diag.ess = 1.0 / sum_sq;
  diag.weight_sum = sum;
  std::vector<double> f1, f2, f3;
  f1.reserve(outcomes.size());
  f2.reserve(outcomes.size());
  f3.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    f1.push_back(o.lik.l1);
    f2.push_back(o.lik.l2);
    f3.push_back(o.lik.l3);
  }
  diag.l1 = factor_stats(std::move(f1));
  diag.l2 = factor_stats(std::move(f2));
  diag.l3 = factor_stats(std::move(f3));
  for (std::size_t c = 0; c < n_cp; ++c)
    diag.displacement = std::max(diag.displacement, (mean[c] - prior.means()[c]).norm());

  BezierCurve posterior(std::move(mean), prior.delta_t());
  CurveKinematics scratch;
  diag.posterior = curve_violations(sampler, scratch, posterior, ev);
  return {std::move(posterior), diag, std::move(weights)};
}

BezierCurve dbf_run(const ProbBezierCurve& prior, const Evidence& ev, const DbfConfig& cfg, RandomStream& rng,
                    std::vector<DbfDiagnostics>* diagnostics) {
  cfg.validate();
  ProbBezierCurve current = prior;
  BezierCurve result = prior.mean_curve();
  const Mat2 cov = cfg.prior_variance * Mat2::Identity();
  for (int it = 0; it < cfg.n_iterations; ++it) {
    DbfStepResult step = dbf_step(current, ev, cfg, rng);
    step.diagnostics.iteration = it;
    if (diagnostics != nullptr) diagnostics->push_back(step.diagnostics);
    result = step.posterior_mean;
    if (step.diagnostics.displacement < cfg.tolerance) break;
    current = ProbBezierCurve::with_shared_covariance(result, cov);
  }
  return result;
}

}  // namespace dbf
