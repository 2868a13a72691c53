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

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dbf/geometry.hpp"

namespace dbf {

/// A planar Bézier curve of order k (k+1 control points) traversed in
/// `delta_t` seconds, so that t = s * delta_t for s in [0, 1].
///
/// Order 0 is permitted so that the derivative of a linear curve is itself a
/// BezierCurve (a constant).
class BezierCurve {
 public:
  BezierCurve(std::vector<Vec2> control_points, double delta_t);

  int order() const { return static_cast<int>(control_points_.size()) - 1; }
  double delta_t() const { return delta_t_; }
  std::span<const Vec2> control_points() const { return control_points_; }
  const Vec2& control_point(int i) const { return control_points_[static_cast<std::size_t>(i)]; }

  BezierCurve with_delta_t(double delta_t) const { return {control_points_, delta_t}; }

 private:
  std::vector<Vec2> control_points_;
  double delta_t_;
};

/// Position, time derivatives and their decomposition along/across the
/// direction of travel at one curve parameter.
struct KinematicSample {
  Vec2 position;
  Vec2 velocity;      // m/s
  Vec2 acceleration;  // m/s^2
  double speed;
  double centripetal_accel;   // >= 0
  double longitudinal_accel;  // signed, positive = speeding up
};

inline constexpr double kDegenerateSpeed = 1e-9;

double binomial(int n, int k);

/// b_{i,k}(s). Throws DomainError for i outside [0,k] or s outside [0,1].
double bernstein(int i, int k, double s);

/// Fills `out` (size k+1) with all order-k Bernstein weights at s, no checks.
void bernstein_basis(int k, double s, std::span<double> out);

Vec2 evaluate(const BezierCurve& curve, double s);

/// d/ds of the curve: order k-1 with control points k (C_{i+1} - C_i). The
/// derivative of an order-0 curve is the zero constant.
BezierCurve derivative(const BezierCurve& curve);

/// Throws DegenerateVelocityError when the speed is <= kDegenerateSpeed.
KinematicSample kinematics(const BezierCurve& curve, double s);

/// Least-squares fit at explicit parameters. With `clamp_ends` the first and
/// last control points equal the first and last input points exactly.
BezierCurve fit_bezier(std::span<const Vec2> points, std::span<const double> params, int order,
                       bool clamp_ends, double delta_t = 1.0);

/// Same, with normalized chord-length parameters.
BezierCurve fit_bezier(std::span<const Vec2> points, int order, bool clamp_ends,
                       double delta_t = 1.0);

/// Residual scales of a kinematic fit: position in m, velocity in m/s,
/// acceleration in m/s^2.
struct KinematicFitScales {
  double position = 0.1;
  double velocity = 0.5;
  double acceleration = 1.0;
};

/// Clamped least-squares fit that also matches time derivatives: at each
/// parameter s_j the curve position, B'(s_j) / delta_t and B''(s_j) / delta_t^2
/// are pulled towards the given samples, residuals divided by `scales`.
/// First and last control points equal the first and last points exactly.
BezierCurve fit_bezier_kinematic(std::span<const Vec2> points, std::span<const Vec2> velocities,
                                 std::span<const Vec2> accelerations, std::span<const double> params, int order,
                                 double delta_t, const KinematicFitScales& scales = {});

std::vector<double> chord_length_params(std::span<const Vec2> points);

/// Length of the polyline through `samples` uniform-s points.
double arc_length(const BezierCurve& curve, int samples);

}  // namespace dbf
