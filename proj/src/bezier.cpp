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

#include "dbf/bezier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "dbf/errors.hpp"

namespace dbf {

BezierCurve::BezierCurve(std::vector<Vec2> control_points, double delta_t)
    : control_points_(std::move(control_points)), delta_t_(delta_t) {
  if (control_points_.empty()) throw ValidationError("Bezier curve needs at least one control point");
  if (!(delta_t_ > 0.0) || !std::isfinite(delta_t_))
    throw ValidationError("Bezier delta_t must be finite and positive");
  for (const auto& p : control_points_) {
    if (!p.allFinite()) throw ValidationError("Bezier control point is not finite");
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  return c;
}

double bernstein(int i, int k, double s) {
  if (k < 0 || i < 0 || i > k)
    throw DomainError("bernstein index " + std::to_string(i) + " outside [0, " + std::to_string(k) + "]");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("bernstein parameter outside [0, 1]");
  return binomial(k, i) * std::pow(1.0 - s, k - i) * std::pow(s, i);
}

void bernstein_basis(int k, double s, std::span<double> out) {
  const double t = 1.0 - s;
  for (int i = 0; i <= k; ++i)
    out[static_cast<std::size_t>(i)] = binomial(k, i) * std::pow(t, k - i) * std::pow(s, i);
}

Vec2 evaluate(const BezierCurve& curve, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("curve parameter outside [0, 1]");
  const int k = curve.order();
  // Endpoints are returned exactly rather than via a weighted sum.
  if (s == 0.0) return curve.control_point(0);
  if (s == 1.0) return curve.control_point(k);
  double weights[32];
  std::vector<double> heap;
  std::span<double> w(weights, 32);
  if (k + 1 > 32) {
    heap.resize(static_cast<std::size_t>(k) + 1);
    w = heap;
  }
  bernstein_basis(k, s, w);
  Vec2 p = Vec2::Zero();
  for (int i = 0; i <= k; ++i) p += w[static_cast<std::size_t>(i)] * curve.control_point(i);
  return p;
}

BezierCurve derivative(const BezierCurve& curve) {
  const int k = curve.order();
  if (k == 0) return BezierCurve({Vec2::Zero()}, curve.delta_t());
  std::vector<Vec2> d;
  d.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    d.push_back(static_cast<double>(k) * (curve.control_point(i + 1) - curve.control_point(i)));
  return BezierCurve(std::move(d), curve.delta_t());
}

KinematicSample kinematics(const BezierCurve& curve, double s) {
  const BezierCurve d1 = derivative(curve);
  const BezierCurve d2 = derivative(d1);
  const double inv_dt = 1.0 / curve.delta_t();
  KinematicSample out;
  out.position = evaluate(curve, s);
  out.velocity = inv_dt * evaluate(d1, s);
  out.acceleration = (inv_dt * inv_dt) * evaluate(d2, s);
  out.speed = out.velocity.norm();
  if (out.speed <= kDegenerateSpeed)
    throw DegenerateVelocityError("curve speed vanishes; tangential/normal split undefined");
  out.longitudinal_accel = out.velocity.dot(out.acceleration) / out.speed;
  out.centripetal_accel = std::abs(cross(out.velocity, out.acceleration)) / out.speed;
  return out;
}

std::vector<double> chord_length_params(std::span<const Vec2> points) {
  std::vector<double> params(points.size(), 0.0);
  for (std::size_t j = 1; j < points.size(); ++j)
    params[j] = params[j - 1] + (points[j] - points[j - 1]).norm();
  const double total = params.empty() ? 0.0 : params.back();
  if (!(total > 0.0)) throw FitError("chord-length parameterization of coincident points");
  for (auto& p : params) p /= total;
  params.back() = 1.0;
  return params;
}

BezierCurve fit_bezier(std::span<const Vec2> points, std::span<const double> params, int order,
                       bool clamp_ends, double delta_t) {
  if (order < 1) throw FitError("fit order must be >= 1");
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < order + 1) throw FitError("fit needs at least order+1 points");
  if (params.size() != points.size()) throw FitError("params and points differ in length");
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (!(params[j] >= 0.0 && params[j] <= 1.0)) throw FitError("fit parameter outside [0, 1]");
    if (j > 0 && !(params[j] > params[j - 1])) throw FitError("fit parameters not strictly increasing");
  }

  Eigen::MatrixXd basis(n, order + 1);
  std::vector<double> w(static_cast<std::size_t>(order) + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    bernstein_basis(order, params[static_cast<std::size_t>(j)], w);
    for (int i = 0; i <= order; ++i) basis(j, i) = w[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) rhs.row(j) = points[static_cast<std::size_t>(j)].transpose();

  std::vector<Vec2> control(static_cast<std::size_t>(order) + 1);
  if (clamp_ends) {
    const Vec2 first = points.front();
    const Vec2 last = points.back();
    control.front() = first;
    control.back() = last;
    if (order >= 2) {
      Eigen::MatrixXd reduced = rhs - basis.col(0) * first.transpose() - basis.col(order) * last.transpose();
      Eigen::MatrixXd interior = basis.middleCols(1, order - 1);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(interior);
      if (qr.rank() < order - 1) throw FitError("rank-deficient Bezier fit");
      Eigen::MatrixXd sol = qr.solve(reduced);
      for (int i = 1; i < order; ++i) control[static_cast<std::size_t>(i)] = sol.row(i - 1).transpose();
    }
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
    if (qr.rank() < order + 1) throw FitError("rank-deficient Bezier fit");
    Eigen::MatrixXd sol = qr.solve(rhs);
    for (int i = 0; i <= order; ++i) control[static_cast<std::size_t>(i)] = sol.row(i).transpose();
  }
  return BezierCurve(std::move(control), delta_t);
}

BezierCurve fit_bezier_kinematic(std::span<const Vec2> points, std::span<const Vec2> velocities,
                                 std::span<const Vec2> accelerations, std::span<const double> params, int order,
                                 double delta_t, const KinematicFitScales& scales) {
  if (order < 2) throw FitError("kinematic fit order must be >= 2");
  const std::size_t m = points.size();
  if (velocities.size() != m || accelerations.size() != m || params.size() != m)
    throw FitError("kinematic fit inputs differ in length");
  if (m < 2) throw FitError("kinematic fit needs at least 2 points");
  if (!(delta_t > 0.0)) throw FitError("kinematic fit delta_t must be positive");
  if (!(scales.position > 0.0 && scales.velocity > 0.0 && scales.acceleration > 0.0))
    throw FitError("kinematic fit scales must be positive");
  for (std::size_t j = 0; j < m; ++j) {
    if (!(params[j] >= 0.0 && params[j] <= 1.0)) throw FitError("fit parameter outside [0, 1]");
    if (j > 0 && !(params[j] > params[j - 1])) throw FitError("fit parameters not strictly increasing");
  }

  const int k = order;
  const auto rows = static_cast<Eigen::Index>(3 * m);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, k + 1);
  Eigen::MatrixXd rhs(rows, 2);
  std::vector<double> b0(static_cast<std::size_t>(k) + 1), b1(static_cast<std::size_t>(k)),
      b2(static_cast<std::size_t>(k) - 1);
  const double wp = 1.0 / scales.position;
  const double wv = 1.0 / (scales.velocity * delta_t);
  const double wa = 1.0 / (scales.acceleration * delta_t * delta_t);
  for (std::size_t j = 0; j < m; ++j) {
    const auto r = static_cast<Eigen::Index>(3 * j);
    bernstein_basis(k, params[j], b0);
    bernstein_basis(k - 1, params[j], b1);
    bernstein_basis(k - 2, params[j], b2);
    for (int i = 0; i <= k; ++i) {
      const auto u = static_cast<std::size_t>(i);
      a(r, i) = wp * b0[u];
      const double d1 = (i >= 1 ? b1[u - 1] : 0.0) - (i <= k - 1 ? b1[u] : 0.0);
      a(r + 1, i) = wv * k * d1;
      const double d2 = (i >= 2 ? b2[u - 2] : 0.0) - (i >= 1 && i - 1 <= k - 2 ? 2.0 * b2[u - 1] : 0.0) +
                        (i <= k - 2 ? b2[u] : 0.0);
      a(r + 2, i) = wa * k * (k - 1) * d2;
    }
    rhs.row(r) = wp * points[j].transpose();
    rhs.row(r + 1) = (wv * delta_t) * velocities[j].transpose();
    rhs.row(r + 2) = (wa * delta_t * delta_t) * accelerations[j].transpose();
  }
  const Vec2 first = points.front();
  const Vec2 last = points.back();
  const Eigen::MatrixXd reduced = rhs - a.col(0) * first.transpose() - a.col(k) * last.transpose();
  const Eigen::MatrixXd interior = a.middleCols(1, k - 1);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(interior);
  if (qr.rank() < k - 1) throw FitError("rank-deficient kinematic Bezier fit");
  const Eigen::MatrixXd sol = qr.solve(reduced);
  std::vector<Vec2> control(static_cast<std::size_t>(k) + 1);
  control.front() = first;
  control.back() = last;
  for (int i = 1; i < k; ++i) control[static_cast<std::size_t>(i)] = sol.row(i - 1).transpose();
  return BezierCurve(std::move(control), delta_t);
}

BezierCurve fit_bezier(std::span<const Vec2> points, int order, bool clamp_ends, double delta_t) {
  const std::vector<double> params = chord_length_params(points);
  return fit_bezier(points, params, order, clamp_ends, delta_t);
}

double arc_length(const BezierCurve& curve, int samples) {
  if (samples < 2) throw DomainError("arc_length needs at least 2 samples");
  double length = 0.0;
  Vec2 prev = evaluate(curve, 0.0);
  for (int j = 1; j < samples; ++j) {
    const double s = j == samples - 1 ? 1.0 : static_cast<double>(j) / (samples - 1);
    const Vec2 p = evaluate(curve, s);
    length += (p - prev).norm();
    prev = p;
  }
  return length;
}

}  // namespace dbf
