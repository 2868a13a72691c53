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

#include <vector>

#include "dbf/bezier.hpp"
#include "dbf/simd/kinematics_kernels.hpp"

namespace dbf {

/// Kinematics at M uniform parameters s_j = j / (M - 1). Arrays are padded
/// to a multiple of 4; only the first `samples` entries are meaningful.
struct CurveKinematics {
  int samples = 0;
  std::vector<double> x, y, speed, a_long, a_cent;
  // per-curve scratch
  std::vector<double> cx, cy, dcx, dcy, ddcx, ddcy;
};

/// Precomputed Bernstein tables for one (order, M) pair, evaluated through
/// the batch kernel chosen at runtime.
class CurveSampler {
 public:
  /// kernel == nullptr selects the best kernel for this CPU.
  CurveSampler(int order, int samples, const simd::KernelInfo* kernel = nullptr);

  int order() const { return order_; }
  int samples() const { return samples_; }
  int stride() const { return stride_; }
  const simd::KernelInfo& kernel() const { return *kernel_; }
  double param(int j) const { return params_[static_cast<std::size_t>(j)]; }

  /// Throws ValidationError if the curve order differs.
  void evaluate(const BezierCurve& curve, CurveKinematics& out) const;

 private:
  int order_;
  int samples_;
  int stride_;
  const simd::KernelInfo* kernel_;
  std::vector<double> params_;
  std::vector<double> pos_, vel_, acc_;
};

}  // namespace dbf
