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

#include <immintrin.h>

#include "dbf/simd/kinematics_kernels.hpp"

namespace dbf::simd {

namespace {

inline __m256d weighted_sum4(const double* rows, int n_rows, int stride, int j, const double* coeff) {
  __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(rows + j), _mm256_set1_pd(coeff[0]));
  for (int i = 1; i < n_rows; ++i)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(rows + i * stride + j), _mm256_set1_pd(coeff[i]), acc);
  return acc;
}

}  // namespace

void kinematics_avx2(const BasisView& b, const CurveInput& c, const KinematicsOut& out) {
  const int k = b.order;
  const __m256d inv_dt = _mm256_set1_pd(c.inv_dt);
  const __m256d inv_dt2 = _mm256_set1_pd(c.inv_dt2);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  for (int j = 0; j < b.samples; j += 4) {
    _mm256_storeu_pd(out.x + j, weighted_sum4(b.pos, k + 1, b.stride, j, c.cx));
    _mm256_storeu_pd(out.y + j, weighted_sum4(b.pos, k + 1, b.stride, j, c.cy));
    __m256d vx = zero, vy = zero, ax = zero, ay = zero;
    if (k >= 1) {
      vx = _mm256_mul_pd(weighted_sum4(b.vel, k, b.stride, j, c.dcx), inv_dt);
      vy = _mm256_mul_pd(weighted_sum4(b.vel, k, b.stride, j, c.dcy), inv_dt);
    }
    if (k >= 2) {
      ax = _mm256_mul_pd(weighted_sum4(b.acc, k - 1, b.stride, j, c.ddcx), inv_dt2);
      ay = _mm256_mul_pd(weighted_sum4(b.acc, k - 1, b.stride, j, c.ddcy), inv_dt2);
    }
    const __m256d speed = _mm256_sqrt_pd(_mm256_fmadd_pd(vx, vx, _mm256_mul_pd(vy, vy)));
    _mm256_storeu_pd(out.speed + j, speed);
    _mm256_storeu_pd(out.a_long + j, _mm256_div_pd(_mm256_fmadd_pd(vx, ax, _mm256_mul_pd(vy, ay)), speed));
    const __m256d normal = _mm256_fmsub_pd(vx, ay, _mm256_mul_pd(vy, ax));
    _mm256_storeu_pd(out.a_cent + j, _mm256_div_pd(_mm256_andnot_pd(sign_mask, normal), speed));
  }
}

}  // namespace dbf::simd
