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
#include <random>
#include <vector>

#include "dbf/bezier.hpp"
#include "dbf/errors.hpp"

namespace dbf {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Bernstein weight straight from the closed form.
double bernstein_oracle(int i, int k, double s) {
  return factorial(k) / (factorial(i) * factorial(k - i)) * std::pow(s, i) * std::pow(1.0 - s, k - i);
}

BezierCurve random_curve(std::mt19937_64& gen, int order, double delta_t = 1.0) {
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<Vec2> cps;
  for (int i = 0; i <= order; ++i) cps.emplace_back(u(gen), u(gen));
  return BezierCurve(cps, delta_t);
}

TEST(Bernstein, EndpointCase) { EXPECT_DOUBLE_EQ(bernstein(0, 1, 0.0), 1.0); }

TEST(Bernstein, MiddleWeightOfOrderFour) { EXPECT_NEAR(bernstein(2, 4, 0.5), 0.375, 1e-15); }

TEST(Bernstein, MatchesClosedForm) {
  for (int k = 0; k <= 9; ++k)
    for (int i = 0; i <= k; ++i)
      for (double s : {0.0, 0.1, 0.33, 0.5, 0.77, 1.0}) EXPECT_NEAR(bernstein(i, k, s), bernstein_oracle(i, k, s), 1e-13);
}

TEST(Bernstein, PartitionOfUnity) {
  for (int k = 0; k <= 12; ++k) {
    for (int j = 0; j <= 100; ++j) {
      const double s = j / 100.0;
      double sum = 0.0;
      for (int i = 0; i <= k; ++i) sum += bernstein(i, k, s);
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Bernstein, RejectsOutOfRange) {
  EXPECT_THROW(bernstein(3, 2, 0.5), DomainError);
  EXPECT_THROW(bernstein(-1, 2, 0.5), DomainError);
  EXPECT_THROW(bernstein(0, 2, 1.5), DomainError);
  EXPECT_THROW(bernstein(0, 2, -0.1), DomainError);
}

TEST(Bernstein, BasisFillMatchesScalar) {
  std::vector<double> out(8);
  bernstein_basis(7, 0.3, out);
  for (int i = 0; i <= 7; ++i) EXPECT_NEAR(out[static_cast<std::size_t>(i)], bernstein(i, 7, 0.3), 1e-15);
}

TEST(BezierCurve, RejectsInvalidInput) {
  EXPECT_THROW(BezierCurve({}, 1.0), ValidationError);
  EXPECT_THROW(BezierCurve({Vec2(0, 0), Vec2(1, 0)}, 0.0), ValidationError);
  EXPECT_THROW(BezierCurve({Vec2(0, 0), Vec2(NAN, 0)}, 1.0), ValidationError);
}

TEST(Evaluate, InterpolatesEndpoints) {
  std::mt19937_64 gen(3);
  for (int k = 1; k <= 9; ++k) {
    const BezierCurve c = random_curve(gen, k);
    EXPECT_LT((evaluate(c, 0.0) - c.control_point(0)).norm(), 1e-12);
    EXPECT_LT((evaluate(c, 1.0) - c.control_point(k)).norm(), 1e-12);
  }
}

TEST(Evaluate, LinearMidpoint) {
  const BezierCurve c({Vec2(0, 0), Vec2(2, 0)}, 1.0);
  EXPECT_LT((evaluate(c, 0.5) - Vec2(1, 0)).norm(), 1e-15);
}

TEST(Evaluate, MatchesBernsteinSum) {
  std::mt19937_64 gen(5);
  const BezierCurve c = random_curve(gen, 7);
  for (double s : {0.0, 0.2, 0.45, 0.9, 1.0}) {
    Vec2 p = Vec2::Zero();
    for (int i = 0; i <= 7; ++i) p += bernstein_oracle(i, 7, s) * c.control_point(i);
    EXPECT_LT((evaluate(c, s) - p).norm(), 1e-11);
  }
}

TEST(Derivative, LinearIsConstant) {
  const BezierCurve d = derivative(BezierCurve({Vec2(0, 0), Vec2(3, 4)}, 1.0));
  EXPECT_EQ(d.order(), 0);
  EXPECT_LT((evaluate(d, 0.3) - Vec2(3, 4)).norm(), 1e-15);
}

TEST(Derivative, ConstantCurveIsZero) {
  const BezierCurve d = derivative(BezierCurve({Vec2(1, 2), Vec2(1, 2), Vec2(1, 2)}, 1.0));
  for (double s : {0.0, 0.5, 1.0}) EXPECT_LT(evaluate(d, s).norm(), 1e-15);
  const BezierCurve dd = derivative(BezierCurve({Vec2(1, 2)}, 1.0));
  EXPECT_LT(evaluate(dd, 0.5).norm(), 1e-15);
}

TEST(Derivative, MatchesCentralFiniteDifference) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> us(0.05, 0.95);
  const double h = 1e-5;
  for (int n = 0; n < 100; ++n) {
    const int k = 1 + n % 9;
    const BezierCurve c = random_curve(gen, k);
    const BezierCurve d = derivative(c);
    const double s = us(gen);
    const Vec2 fd = (evaluate(c, s + h) - evaluate(c, s - h)) / (2.0 * h);
    const Vec2 an = evaluate(d, s);
    EXPECT_LT((fd - an).norm() / std::max(an.norm(), 1.0), 1e-6) << "order " << k;
  }
}

TEST(Kinematics, StraightSegment) {
  const BezierCurve c({Vec2(0, 0), Vec2(10, 0)}, 2.0);
  for (double s : {0.0, 0.4, 1.0}) {
    const KinematicSample k = kinematics(c, s);
    EXPECT_NEAR(k.speed, 5.0, 1e-12);
    EXPECT_NEAR(k.centripetal_accel, 0.0, 1e-12);
    EXPECT_NEAR(k.longitudinal_accel, 0.0, 1e-12);
  }
}

TEST(Kinematics, ArcCentripetalAcceleration) {
  // Circular arc of radius R sampled densely and fitted; traversal time
  // chosen for speed v, so a_c should be v^2 / R.
  const double R = 100.0, v = 60.0, sweep = 0.6;
  std::vector<Vec2> pts;
  std::vector<double> params;
  for (int j = 0; j <= 40; ++j) {
    const double s = j / 40.0;
    pts.emplace_back(R * std::sin(sweep * s), R * (1.0 - std::cos(sweep * s)));
    params.push_back(s);
  }
  const double delta_t = R * sweep / v;
  const BezierCurve c = fit_bezier(pts, params, 5, true, delta_t);
  const KinematicSample k = kinematics(c, 0.5);
  EXPECT_NEAR(k.centripetal_accel, v * v / R, 0.02 * v * v / R);
  EXPECT_NEAR(k.speed, v, 0.01 * v);
}

TEST(Kinematics, OrthogonalDecomposition) {
  std::mt19937_64 gen(17);
  for (int n = 0; n < 50; ++n) {
    const BezierCurve c = random_curve(gen, 2 + n % 7, 1.5);
    const KinematicSample k = kinematics(c, 0.37);
    const double lhs = k.centripetal_accel * k.centripetal_accel + k.longitudinal_accel * k.longitudinal_accel;
    EXPECT_NEAR(lhs, k.acceleration.squaredNorm(), 1e-9 * std::max(1.0, k.acceleration.squaredNorm()));
    EXPECT_NEAR(k.speed, k.velocity.norm(), 1e-12 * std::max(1.0, k.speed));
    EXPECT_GE(k.centripetal_accel, 0.0);
  }
}

TEST(Kinematics, TimeScalingLaws) {
  std::mt19937_64 gen(19);
  for (int n = 0; n < 30; ++n) {
    const BezierCurve c = random_curve(gen, 3 + n % 6, 2.0);
    for (double factor : {2.0, 1.15, 3.7}) {
      const BezierCurve fast = c.with_delta_t(c.delta_t() / factor);
      const KinematicSample a = kinematics(c, 0.6), b = kinematics(fast, 0.6);
      EXPECT_NEAR(b.speed, factor * a.speed, 1e-9 * b.speed);
      EXPECT_NEAR(b.acceleration.norm(), factor * factor * a.acceleration.norm(), 1e-9 * b.acceleration.norm());
      EXPECT_NEAR(b.centripetal_accel, factor * factor * a.centripetal_accel, 1e-8 * (1.0 + b.centripetal_accel));
    }
  }
}

TEST(Kinematics, DegenerateVelocityThrows) {
  const BezierCurve c({Vec2(1, 1), Vec2(1, 1), Vec2(2, 1)}, 1.0);
  EXPECT_THROW(kinematics(c, 0.0), DegenerateVelocityError);
}

TEST(Fit, RecoversKnownCurve) {
  std::mt19937_64 gen(23);
  const BezierCurve truth = random_curve(gen, 7);
  std::vector<Vec2> pts;
  std::vector<double> params;
  for (int j = 0; j < 20; ++j) {
    params.push_back(j / 19.0);
    pts.push_back(evaluate(truth, params.back()));
  }
  for (bool clamp : {false, true}) {
    const BezierCurve fit = fit_bezier(pts, params, 7, clamp);
    for (int i = 0; i <= 7; ++i) EXPECT_LT((fit.control_point(i) - truth.control_point(i)).norm(), 1e-6);
  }
}

TEST(Fit, TwoPointsOrderOne) {
  const std::vector<Vec2> pts{Vec2(1, 1), Vec2(4, 5)};
  const BezierCurve fit = fit_bezier(pts, 1, false);
  EXPECT_LT((fit.control_point(0) - pts[0]).norm(), 1e-12);
  EXPECT_LT((fit.control_point(1) - pts[1]).norm(), 1e-12);
}

TEST(Fit, ClampedEndsAreExact) {
  std::vector<Vec2> pts;
  for (int j = 0; j < 30; ++j) pts.emplace_back(j * 1.3, std::sin(j * 0.4) * 3.0);
  const BezierCurve fit = fit_bezier(pts, 5, true);
  EXPECT_EQ(evaluate(fit, 0.0), pts.front());
  EXPECT_EQ(evaluate(fit, 1.0), pts.back());
}

TEST(Fit, RejectsTooFewPoints) {
  const std::vector<Vec2> pts{Vec2(0, 0), Vec2(1, 0), Vec2(2, 1)};
  EXPECT_THROW(fit_bezier(pts, 5, false), FitError);
}

TEST(Fit, KinematicFitMatchesTrajectoryDerivatives) {
  // A true order-5 curve: sampled position, velocity and acceleration must be
  // reproduced (the model contains the truth).
  std::mt19937_64 gen(29);
  const double dt = 2.0;
  const BezierCurve truth = random_curve(gen, 5, dt);
  std::vector<Vec2> p, v, a;
  std::vector<double> params;
  for (int j = 0; j <= 20; ++j) {
    const double s = j / 20.0;
    const KinematicSample k = kinematics(truth, s);
    params.push_back(s);
    p.push_back(k.position);
    v.push_back(k.velocity);
    a.push_back(k.acceleration);
  }
  const BezierCurve fit = fit_bezier_kinematic(p, v, a, params, 5, dt);
  for (int i = 0; i <= 5; ++i) EXPECT_LT((fit.control_point(i) - truth.control_point(i)).norm(), 1e-6);
  EXPECT_EQ(fit.control_point(0), p.front());
  EXPECT_EQ(fit.control_point(5), p.back());
}

TEST(ArcLength, StraightSegment) {
  const BezierCurve c({Vec2(0, 0), Vec2(6, 8)}, 1.0);
  EXPECT_NEAR(arc_length(c, 50), 10.0, 1e-9);
}

TEST(ArcLength, HalfCircle) {
  std::vector<Vec2> pts;
  for (int j = 0; j <= 60; ++j) {
    const double th = std::numbers::pi * j / 60.0;
    pts.emplace_back(std::cos(th), std::sin(th));
  }
  const BezierCurve c = fit_bezier(pts, 9, true);
  EXPECT_NEAR(arc_length(c, 100), std::numbers::pi, 0.01 * std::numbers::pi);
}

TEST(ArcLength, TwoSamplesIsChord) {
  std::mt19937_64 gen(31);
  const BezierCurve c = random_curve(gen, 4);
  EXPECT_NEAR(arc_length(c, 2), (c.control_point(4) - c.control_point(0)).norm(), 1e-12);
}

TEST(ChordLength, NormalizedAndMonotone) {
  const std::vector<Vec2> pts{Vec2(0, 0), Vec2(1, 0), Vec2(3, 0), Vec2(6, 0)};
  const std::vector<double> u = chord_length_params(pts);
  EXPECT_DOUBLE_EQ(u.front(), 0.0);
  EXPECT_DOUBLE_EQ(u.back(), 1.0);
  EXPECT_NEAR(u[1], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(u[2], 0.5, 1e-15);
}

}  // namespace
}  // namespace dbf
