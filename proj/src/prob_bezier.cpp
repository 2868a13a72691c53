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

#include "dbf/prob_bezier.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dbf/errors.hpp"

namespace dbf {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kNegativeEigenTol = 1e-12;

Mat2 psd_factor(const Mat2& cov) {
  if (!cov.allFinite()) throw ValidationError("covariance is not finite");
  if (std::abs(cov(0, 1) - cov(1, 0)) > kSymmetryTol) throw ValidationError("covariance is not symmetric");
  const Mat2 sym = 0.5 * (cov + cov.transpose());
  if (sym.isZero(0.0)) return Mat2::Zero();
  Eigen::SelfAdjointEigenSolver<Mat2> eig(sym);
  Eigen::Vector2d values = eig.eigenvalues();
  for (int i = 0; i < 2; ++i) {
    if (values(i) < -kNegativeEigenTol) throw ValidationError("covariance is not positive semidefinite");
    values(i) = std::max(values(i), 0.0);
  }
  return eig.eigenvectors() * values.cwiseSqrt().asDiagonal();
}

}  // namespace

ProbBezierCurve::ProbBezierCurve(std::vector<Vec2> means, std::vector<Mat2> covariances, double delta_t)
    : means_(std::move(means)), covariances_(std::move(covariances)), delta_t_(delta_t) {
  if (means_.empty()) throw ValidationError("probabilistic curve needs at least one control point");
  if (means_.size() != covariances_.size())
    throw ValidationError("means and covariances differ in length");
  if (!(delta_t_ > 0.0) || !std::isfinite(delta_t_)) throw ValidationError("delta_t must be positive");
  factors_.reserve(covariances_.size());
  for (const auto& cov : covariances_) factors_.push_back(psd_factor(cov));
}

ProbBezierCurve ProbBezierCurve::with_shared_covariance(const BezierCurve& mean, const Mat2& covariance) {
  std::vector<Vec2> means(mean.control_points().begin(), mean.control_points().end());
  std::vector<Mat2> covs(means.size(), covariance);
  return ProbBezierCurve(std::move(means), std::move(covs), mean.delta_t());
}

BezierCurve sample_curve(const ProbBezierCurve& pbc, RandomStream& rng) {
  std::vector<Vec2> points;
  points.reserve(pbc.means().size());
  for (int i = 0; i <= pbc.order(); ++i) {
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    points.push_back(pbc.means()[static_cast<std::size_t>(i)] + pbc.factor(i) * Vec2(z0, z1));
  }
  return BezierCurve(std::move(points), pbc.delta_t());
}

std::pair<Vec2, Mat2> point_distribution(const ProbBezierCurve& pbc, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("curve parameter outside [0, 1]");
  const int k = pbc.order();
  std::vector<double> w(static_cast<std::size_t>(k) + 1);
  bernstein_basis(k, s, w);
  Vec2 mean = Vec2::Zero();
  Mat2 cov = Mat2::Zero();
  for (int i = 0; i <= k; ++i) {
    const double wi = w[static_cast<std::size_t>(i)];
    mean += wi * pbc.means()[static_cast<std::size_t>(i)];
    cov += (wi * wi) * pbc.covariances()[static_cast<std::size_t>(i)];
  }
  return {mean, cov};
}

}  // namespace dbf
