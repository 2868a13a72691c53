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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dbf/errors.hpp"
#include "dbf/filter.hpp"
#include "dbf/track_gen.hpp"

namespace dbf {
namespace {

AccelEnvelope huge_envelope() {
  return AccelEnvelope(PiecewiseLinear({{0.0, 1e4}, {1e3, 0.0}}), PiecewiseLinear({{0.0, -1e4}}));
}

// Constant-speed arc of radius r starting at the origin heading +x.
BezierCurve arc_curve(double radius, double speed, double length) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 100; ++i) {
    const double a = length / radius * i / 100.0;
    pts.emplace_back(radius * std::sin(a), radius * (1.0 - std::cos(a)));
  }
  return fit_bezier(pts, 7, true, length / speed);
}

BezierCurve straight_curve(const Vec2& start, double speed, double duration, int order = 7) {
  std::vector<Vec2> cps;
  for (int i = 0; i <= order; ++i) cps.push_back(start + Vec2(speed * duration * i / order, 0.0));
  return BezierCurve(std::move(cps), duration);
}

// Wide circle; its bottom point is the origin, heading +x.
const GeneratedTrack& wide_track() {
  static const GeneratedTrack g = generate_circle({500.0, 100.0, 4.0});
  return g;
}

TEST(DeltaAc, StraightLineHasNoCentripetalLoad) {
  EXPECT_NEAR(delta_a_c(straight_curve(Vec2::Zero(), 40.0, 2.0), 26.5, 60), -26.5, 1e-9);
}

TEST(DeltaAc, ArcMatchesVSquaredOverR) {
  const BezierCurve c = arc_curve(100.0, 60.0, 100.0);
  EXPECT_NEAR(delta_a_c(c, 26.5, 60), 9.5, 0.05 * 9.5);
  const BezierCurve faster(std::vector<Vec2>(c.control_points().begin(), c.control_points().end()),
                           c.delta_t() / 1.15);
  EXPECT_GT(delta_a_c(faster, 26.5, 60), delta_a_c(c, 26.5, 60));
  EXPECT_THROW(delta_a_c(c, 26.5, 8), DomainError);
}

TEST(DeltaAl, ConstantSpeedIsSlack) {
  EXPECT_LT(delta_a_l(straight_curve(Vec2::Zero(), 40.0, 2.0), default_envelope(), 60), 0.0);
}

TEST(DeltaAl, HardBrakingExceedsEnvelope) {
  // x(t) = 60 t - 25 t^2 over 0.2 s as an exact quadratic.
  const double T = 0.2;
  const BezierCurve c({Vec2(0, 0), Vec2(60.0 * T / 2.0, 0), Vec2(60.0 * T - 25.0 * T * T, 0)}, T);
  const AccelEnvelope env = default_envelope();
  EXPECT_NEAR(env.a_min(60.0), -36.4, 1e-12);
  EXPECT_NEAR(delta_a_l(c, env, 60), 14.0, 0.1 * 14.0);
}

TEST(DeltaAl, HugeEnvelopeGivesMinusMinMargin) {
  const double T = 0.2;
  const BezierCurve c({Vec2(0, 0), Vec2(6.0, 0), Vec2(11.0, 0)}, T);
  const AccelEnvelope env = huge_envelope();
  const double v = delta_a_l(c, env, 60);
  EXPECT_LE(v, 0.0);
  // a_l = -50 everywhere; the binding margin is throttle at the highest speed.
  EXPECT_NEAR(v, -50.0 - env.a_max(60.0), 1e-6 * 1e4);
}

TEST(Likelihood, FeasibleBranchIsExactlyOne) {
  const DbfConfig cfg;
  const Likelihood l = likelihood_from_violations({-3.0, -1.0, -2.0, false}, cfg, cfg.d_min);
  EXPECT_EQ(l.l1, 1.0);
  EXPECT_EQ(l.l2, 1.0);
  EXPECT_EQ(l.l3, 1.0);
  EXPECT_EQ(l.product, 1.0);
  EXPECT_EQ(l.log_product, 0.0);
}

TEST(Likelihood, UnitViolationsGiveExpMinusBeta) {
  const DbfConfig cfg;
  EXPECT_NEAR(likelihood_from_violations({1.0, -1.0, -2.0, false}, cfg, cfg.d_min).l1, std::exp(-1.75), 1e-12);
  EXPECT_NEAR(likelihood_from_violations({-1.0, 1.0, -2.0, false}, cfg, cfg.d_min).l2, std::exp(-2.5), 1e-12);
  EXPECT_NEAR(likelihood_from_violations({-1.0, -1.0, cfg.d_min + 1.0, false}, cfg, cfg.d_min).l3, std::exp(-3.5),
              1e-12);
  const Likelihood l3 = likelihood_from_violations({-1.0, -1.0, cfg.d_min + 0.5, false}, cfg, cfg.d_min);
  EXPECT_NEAR(l3.l3, 0.1738, 1e-4);
  EXPECT_NEAR(l3.product, std::exp(-1.75), 1e-12);
  const Likelihood all = likelihood_from_violations({1.0, 1.0, cfg.d_min + 1.0, false}, cfg, cfg.d_min);
  EXPECT_NEAR(all.product, std::exp(-1.75 - 2.5 - 3.5), 1e-15);
  EXPECT_NEAR(all.log_product, -(1.75 + 2.5 + 3.5), 1e-12);
}

TEST(Likelihood, MonotoneInEachViolation) {
  const DbfConfig cfg;
  double p1 = 2.0, p2 = 2.0, p3 = 2.0;
  for (double x = -5.0; x <= 10.0; x += 0.05) {
    const double a = likelihood_from_violations({x, -1.0, -2.0, false}, cfg, cfg.d_min).l1;
    const double b = likelihood_from_violations({-1.0, x, -2.0, false}, cfg, cfg.d_min).l2;
    const double c = likelihood_from_violations({-1.0, -1.0, x, false}, cfg, cfg.d_min).l3;
    EXPECT_LE(a, p1);
    EXPECT_LE(b, p2);
    EXPECT_LE(c, p3);
    EXPECT_GT(a, 0.0);
    p1 = a;
    p2 = b;
    p3 = c;
  }
}

TEST(Likelihood, DegenerateIsTiny) {
  const DbfConfig cfg;
  const Likelihood l = likelihood_from_violations({0.0, 0.0, -2.0, true}, cfg, cfg.d_min);
  EXPECT_GT(l.product, 0.0);
  EXPECT_LT(l.product, 1e-300);
}

TEST(Likelihood, CurveOnWideTrackIsFeasible) {
  const GeneratedTrack& g = wide_track();
  const AccelEnvelope env = default_envelope();
  const DbfConfig cfg;
  const Evidence ev{g.track, env, cfg.a_c_max, cfg.d_min};
  const Likelihood l = likelihood(straight_curve(Vec2(-20.0, 0.0), 20.0, 2.0), ev, cfg);
  EXPECT_EQ(l.product, 1.0);
}

TEST(OraclePrior, NoiseFreeMatchesSegment) {
  const GeneratedTrack g = generate_chicane({});
  const RacelineProfile p = build_raceline(g.track, default_envelope(), {});
  DbfConfig cfg;
  RandomStream rng(1);
  const Vec2 pos = p.points[200];
  const ProbBezierCurve prior = oracle_prior(p, pos, cfg, 1.0, 0.0, rng);
  const BezierCurve seg = raceline_segment(p, pos);
  for (int i = 0; i <= 7; ++i) EXPECT_EQ(prior.means()[static_cast<std::size_t>(i)], seg.control_point(i));
  EXPECT_DOUBLE_EQ(prior.delta_t(), seg.delta_t());
  EXPECT_EQ(prior.covariances()[3], Mat2::Identity());
  const ProbBezierCurve fast = oracle_prior(p, pos, cfg, 0.0, rng);
  EXPECT_DOUBLE_EQ(fast.delta_t(), seg.delta_t() / 1.15);
  const double s = 0.5;
  EXPECT_NEAR(kinematics(fast.mean_curve(), s).centripetal_accel,
              1.3225 * kinematics(seg, s).centripetal_accel, 1e-9);
}

TEST(OraclePrior, NoiseHasRequestedSpread) {
  const GeneratedTrack g = generate_chicane({});
  const RacelineProfile p = build_raceline(g.track, default_envelope(), {});
  DbfConfig cfg;
  RandomStream rng(9);
  const Vec2 pos = p.points[100];
  const BezierCurve seg = raceline_segment(p, pos);
  std::vector<double> sq(8, 0.0);
  const int n = 1000;
  for (int t = 0; t < n; ++t) {
    const ProbBezierCurve pr = oracle_prior(p, pos, cfg, 1.0, 0.25, rng);
    EXPECT_EQ(pr.means()[0], seg.control_point(0));
    for (int i = 1; i <= 7; ++i) {
      const Vec2 d = pr.means()[static_cast<std::size_t>(i)] - seg.control_point(i);
      sq[static_cast<std::size_t>(i)] += 0.5 * d.squaredNorm();
    }
  }
  for (int i = 1; i <= 7; ++i) EXPECT_NEAR(std::sqrt(sq[static_cast<std::size_t>(i)] / n), 0.25, 0.025);
}

class FilterScenario : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    track_ = new GeneratedTrack(generate_chicane({}));
    env_ = new AccelEnvelope(default_envelope());
    profile_ = new RacelineProfile(build_raceline(track_->track, *env_, {}));
  }
  static void TearDownTestSuite() {
    delete profile_;
    delete env_;
    delete track_;
  }
  Evidence evidence(const DbfConfig& cfg) const { return {track_->track, *env_, cfg.a_c_max, cfg.d_min}; }
  ProbBezierCurve infeasible_prior(const DbfConfig& cfg) const {
    RandomStream rng(0);
    return oracle_prior(*profile_, approach(100.0), cfg, 0.0, rng);
  }
  // Centerline point `before` metres short of the chicane entry.
  static Vec2 approach(double before) { return track_->track.point_at(track_->feature_begin - before); }
  static GeneratedTrack* track_;
  static AccelEnvelope* env_;
  static RacelineProfile* profile_;
};
GeneratedTrack* FilterScenario::track_ = nullptr;
AccelEnvelope* FilterScenario::env_ = nullptr;
RacelineProfile* FilterScenario::profile_ = nullptr;

TEST_F(FilterScenario, WeightsNormalizeAndEssIsBounded) {
  DbfConfig cfg;
  const Evidence ev = evidence(cfg);
  RandomStream rng(3);
  const DbfStepResult r = dbf_step(infeasible_prior(cfg), ev, cfg, rng);
  double sum = 0.0;
  for (double w : r.weights) {
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(r.diagnostics.weight_sum, 1.0, 1e-12);
  EXPECT_GE(r.diagnostics.ess, 1.0 - 1e-9);
  EXPECT_LE(r.diagnostics.ess, cfg.n_samples + 1e-9);
  EXPECT_DOUBLE_EQ(r.posterior_mean.delta_t(), infeasible_prior(cfg).delta_t());
}

TEST_F(FilterScenario, ZeroCovarianceKeepsPriorMean) {
  DbfConfig cfg;
  cfg.prior_variance = 0.0;
  const ProbBezierCurve base = infeasible_prior(cfg);
  const ProbBezierCurve prior = ProbBezierCurve::with_shared_covariance(base.mean_curve(), Mat2::Zero());
  RandomStream rng(3);
  const DbfStepResult r = dbf_step(prior, evidence(cfg), cfg, rng);
  for (int i = 0; i <= 7; ++i)
    EXPECT_NEAR((r.posterior_mean.control_point(i) - prior.means()[static_cast<std::size_t>(i)]).norm(), 0.0, 1e-9);
}

TEST_F(FilterScenario, StepReducesCentripetalViolation) {
  DbfConfig cfg;
  const Evidence ev = evidence(cfg);
  const ProbBezierCurve prior = infeasible_prior(cfg);
  const double before = delta_a_c(prior.mean_curve(), cfg.a_c_max, cfg.curve_samples);
  ASSERT_GT(before, 0.0);
  RandomStream rng(3);
  const DbfStepResult r = dbf_step(prior, ev, cfg, rng);
  EXPECT_LT(r.diagnostics.posterior.delta_a_c, before);
}

TEST_F(FilterScenario, PosteriorInConvexHullPerPoint) {
  DbfConfig cfg;
  cfg.n_samples = 50;
  const ProbBezierCurve prior = infeasible_prior(cfg);
  RandomStream a(17), b(17);
  const DbfStepResult r = dbf_step(prior, evidence(cfg), cfg, a);
  // Reproduce the drawn samples from the stream layout to bound the mean.
  const std::uint64_t base = b.next_u64();
  for (int c = 1; c <= 7; ++c) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (int i = 0; i < cfg.n_samples; ++i) {
      RandomStream s = RandomStream::substream(base, static_cast<std::uint64_t>(i));
      const Vec2 p = sample_curve(prior, s).control_point(c);
      lo_x = std::min(lo_x, p.x());
      hi_x = std::max(hi_x, p.x());
      lo_y = std::min(lo_y, p.y());
      hi_y = std::max(hi_y, p.y());
    }
    const Vec2 m = r.posterior_mean.control_point(c);
    EXPECT_GE(m.x(), lo_x - 1e-9);
    EXPECT_LE(m.x(), hi_x + 1e-9);
    EXPECT_GE(m.y(), lo_y - 1e-9);
    EXPECT_LE(m.y(), hi_y + 1e-9);
  }
}

TEST_F(FilterScenario, PinnedPointsFollowPriorMean) {
  DbfConfig cfg;
  cfg.pinned_points = 2;
  const ProbBezierCurve prior = infeasible_prior(cfg);
  RandomStream rng(5);
  const DbfStepResult r = dbf_step(prior, evidence(cfg), cfg, rng);
  EXPECT_EQ(r.posterior_mean.control_point(0), prior.means()[0]);
  EXPECT_EQ(r.posterior_mean.control_point(1), prior.means()[1]);
  EXPECT_NE(r.posterior_mean.control_point(2), prior.means()[2]);
  cfg.pinned_points = 8;
  EXPECT_THROW(dbf_step(prior, evidence(cfg), cfg, rng), ValidationError);
}

TEST_F(FilterScenario, SingleIterationRunEqualsStep) {
  DbfConfig cfg;
  cfg.n_iterations = 1;
  const ProbBezierCurve prior = infeasible_prior(cfg);
  RandomStream a(21), b(21);
  const BezierCurve run = dbf_run(prior, evidence(cfg), cfg, a);
  const DbfStepResult step = dbf_step(prior, evidence(cfg), cfg, b);
  for (int i = 0; i <= 7; ++i) EXPECT_EQ(run.control_point(i), step.posterior_mean.control_point(i));
}

TEST_F(FilterScenario, DeterministicAcrossWorkerCounts) {
  DbfConfig cfg;
  const ProbBezierCurve prior = infeasible_prior(cfg);
  std::vector<BezierCurve> outs;
  std::vector<std::vector<DbfDiagnostics>> diags(3);
  for (int w : {1, 3, 8}) {
    cfg.workers = w;
    RandomStream rng(99);
    outs.push_back(dbf_run(prior, evidence(cfg), cfg, rng, &diags[outs.size()]));
  }
  for (std::size_t k = 1; k < outs.size(); ++k) {
    for (int i = 0; i <= 7; ++i) EXPECT_EQ(outs[k].control_point(i), outs[0].control_point(i));
    ASSERT_EQ(diags[k].size(), diags[0].size());
    for (std::size_t it = 0; it < diags[0].size(); ++it)
      EXPECT_EQ(diags[k][it].to_json_line(), diags[0][it].to_json_line());
  }
}

TEST_F(FilterScenario, RunImprovesOnMostRandomizedScenarios) {
  DbfConfig cfg;
  const Evidence ev = evidence(cfg);
  int improved = 0;
  for (int s = 0; s < 50; ++s) {
    RandomStream rng(static_cast<std::uint64_t>(1000 + s));
    const ProbBezierCurve prior = oracle_prior(*profile_, approach(150.0 * rng.uniform()), cfg, 0.25, rng);
    const double before = delta_a_c(prior.mean_curve(), cfg.a_c_max, cfg.curve_samples);
    const BezierCurve post = dbf_run(prior, ev, cfg, rng);
    improved += delta_a_c(post, cfg.a_c_max, cfg.curve_samples) < before ? 1 : 0;
  }
  EXPECT_GE(improved, 48);
}

TEST(FilterFeasiblePrior, StaysNearPriorMean) {
  const GeneratedTrack& g = wide_track();
  const AccelEnvelope env = huge_envelope();
  DbfConfig cfg;
  cfg.n_iterations = 1;
  Evidence ev{g.track, env, 1e4, cfg.d_min};
  const BezierCurve mean = straight_curve(Vec2(-20.0, 0.0), 20.0, 2.25);
  const ProbBezierCurve prior = ProbBezierCurve::with_shared_covariance(mean, Mat2::Identity());
  RandomStream rng(4);
  const DbfStepResult r = dbf_step(prior, ev, cfg, rng);
  for (double w : r.weights) EXPECT_NEAR(w, 1.0 / cfg.n_samples, 1e-15);
  EXPECT_LT(r.diagnostics.displacement, 3.0 / std::sqrt(cfg.n_samples));
}

TEST(DbfConfigTest, ValidationRejectsBadValues) {
  DbfConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beta1 = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = DbfConfig{};
  c.n_samples = 1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = DbfConfig{};
  c.pinned_points = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = DbfConfig{};
  c.workers = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

}  // namespace
}  // namespace dbf
