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
#include <cstring>
#include <random>

#include "dbf/bezier.hpp"
#include "dbf/curve_sampler.hpp"
#include "dbf/errors.hpp"
#include "dbf/simd/kinematics_kernels.hpp"

namespace dbf {
namespace {

BezierCurve random_curve(std::mt19937_64& gen, int order) {
  std::normal_distribution<double> nd(0.0, 3.0);
  std::vector<Vec2> cps;
  for (int i = 0; i <= order; ++i) cps.emplace_back(10.0 * i + nd(gen), nd(gen));
  return BezierCurve(std::move(cps), 2.25);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

TEST(SimdDispatch, ScalarAlwaysAvailable) {
  EXPECT_NE(simd::find_kinematics_kernel("scalar"), nullptr);
  EXPECT_EQ(simd::find_kinematics_kernel("nonexistent"), nullptr);
  const auto all = simd::available_kinematics_kernels();
  ASSERT_FALSE(all.empty());
  EXPECT_STREQ(all.front().name, "scalar");
  bool active_listed = false;
  for (const auto& k : all) active_listed |= std::strcmp(k.name, simd::active_kinematics_kernel().name) == 0;
  EXPECT_TRUE(active_listed);
}

TEST(SimdKernels, AllVariantsBitIdenticalToScalar) {
  const simd::KernelInfo* scalar = simd::find_kinematics_kernel("scalar");
  std::mt19937_64 gen(11);
  for (const auto& kernel : simd::available_kinematics_kernels()) {
    for (int order = 2; order <= 9; ++order) {
      for (int samples : {16, 17, 60, 61, 64}) {
        const CurveSampler ref(order, samples, scalar);
        const CurveSampler alt(order, samples, &kernel);
        CurveKinematics a, b;
        for (int trial = 0; trial < 5; ++trial) {
          const BezierCurve c = random_curve(gen, order);
          ref.evaluate(c, a);
          alt.evaluate(c, b);
          for (int j = 0; j < samples; ++j) {
            const auto u = static_cast<std::size_t>(j);
            ASSERT_TRUE(same_bits(a.x[u], b.x[u])) << kernel.name << " order " << order << " j " << j;
            ASSERT_TRUE(same_bits(a.y[u], b.y[u]));
            ASSERT_TRUE(same_bits(a.speed[u], b.speed[u]));
            ASSERT_TRUE(same_bits(a.a_long[u], b.a_long[u]));
            ASSERT_TRUE(same_bits(a.a_cent[u], b.a_cent[u]));
          }
        }
      }
    }
  }
}

TEST(CurveSamplerTest, MatchesPointwiseKinematics) {
  std::mt19937_64 gen(5);
  for (const auto& kernel : simd::available_kinematics_kernels()) {
    const CurveSampler s(7, 60, &kernel);
    CurveKinematics k;
    for (int trial = 0; trial < 20; ++trial) {
      const BezierCurve c = random_curve(gen, 7);
      s.evaluate(c, k);
      for (int j = 0; j < 60; ++j) {
        const auto u = static_cast<std::size_t>(j);
        EXPECT_DOUBLE_EQ(s.param(j), j / 59.0);
        const KinematicSample ks = kinematics(c, s.param(j));
        const double tol = 1e-9 * (1.0 + std::abs(ks.centripetal_accel) + std::abs(ks.longitudinal_accel));
        EXPECT_NEAR(k.x[u], ks.position.x(), 1e-9);
        EXPECT_NEAR(k.y[u], ks.position.y(), 1e-9);
        EXPECT_NEAR(k.speed[u], ks.speed, 1e-9 * (1.0 + ks.speed));
        EXPECT_NEAR(k.a_long[u], ks.longitudinal_accel, tol);
        EXPECT_NEAR(k.a_cent[u], ks.centripetal_accel, tol);
      }
    }
  }
}

TEST(CurveSamplerTest, RejectsOrderMismatch) {
  const CurveSampler s(7, 60);
  CurveKinematics k;
  std::mt19937_64 gen(1);
  EXPECT_THROW(s.evaluate(random_curve(gen, 5), k), ValidationError);
}

}  // namespace
}  // namespace dbf
