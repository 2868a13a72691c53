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

#include <span>
#include <utility>
#include <vector>

#include "dbf/bezier.hpp"
#include "dbf/random.hpp"

namespace dbf {

/// Bézier curve whose control points are mutually independent Gaussians.
///
/// Covariances must be symmetric (1e-12) and PSD; eigenvalues in
/// [-1e-12, 0) are clamped to zero on construction, anything more negative is
/// rejected with ValidationError.
class ProbBezierCurve {
 public:
  ProbBezierCurve(std::vector<Vec2> means, std::vector<Mat2> covariances, double delta_t);

  /// All control points share one covariance.
  static ProbBezierCurve with_shared_covariance(const BezierCurve& mean, const Mat2& covariance);

  int order() const { return static_cast<int>(means_.size()) - 1; }
  double delta_t() const { return delta_t_; }
  std::span<const Vec2> means() const { return means_; }
  std::span<const Mat2> covariances() const { return covariances_; }
  BezierCurve mean_curve() const { return BezierCurve(means_, delta_t_); }

  /// Square-root factor L with L L^T = covariance of control point i.
  const Mat2& factor(int i) const { return factors_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<Vec2> means_;
  std::vector<Mat2> covariances_;
  std::vector<Mat2> factors_;
  double delta_t_;
};

/// One curve with each control point drawn from its Gaussian. Consumes two
/// normals per control point, in index order.
BezierCurve sample_curve(const ProbBezierCurve& pbc, RandomStream& rng);

/// Mean and covariance of the curve point at s.
std::pair<Vec2, Mat2> point_distribution(const ProbBezierCurve& pbc, double s);

}  // namespace dbf
