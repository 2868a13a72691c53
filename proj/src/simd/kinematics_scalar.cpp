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

#include <cmath>

#include "dbf/simd/kinematics_kernels.hpp"

namespace dbf::simd {

namespace {

double weighted_sum(const double* rows, int n_rows, int stride, int j, const double* coeff) {
  double acc = rows[j] * coeff[0];
  for (int i = 1; i < n_rows; ++i) acc = std::fma(rows[i * stride + j], coeff[i], acc);
  return acc;
}

}  // namespace

void kinematics_scalar(const BasisView& b, const CurveInput& c, const KinematicsOut& out) {
  const int k = b.order;
  for (int j = 0; j < b.samples; ++j) {
    out.x[j] = weighted_sum(b.pos, k + 1, b.stride, j, c.cx);
    out.y[j] = weighted_sum(b.pos, k + 1, b.stride, j, c.cy);
    double vx = 0.0, vy = 0.0, ax = 0.0, ay = 0.0;
    if (k >= 1) {
      vx = weighted_sum(b.vel, k, b.stride, j, c.dcx) * c.inv_dt;
      vy = weighted_sum(b.vel, k, b.stride, j, c.dcy) * c.inv_dt;
    }
    if (k >= 2) {
      ax = weighted_sum(b.acc, k - 1, b.stride, j, c.ddcx) * c.inv_dt2;
      ay = weighted_sum(b.acc, k - 1, b.stride, j, c.ddcy) * c.inv_dt2;
    }
    const double speed = std::sqrt(std::fma(vx, vx, vy * vy));
    out.speed[j] = speed;
    out.a_long[j] = std::fma(vx, ax, vy * ay) / speed;
    out.a_cent[j] = std::fabs(std::fma(vx, ay, -(vy * ax))) / speed;
  }
}

}  // namespace dbf::simd
