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

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace dbf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Left-hand unit normal of a direction.
inline Vec2 left_normal(const Vec2& dir) { return Vec2(-dir.y(), dir.x()); }

// Wraps to (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

struct Pose2 {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
};

}  // namespace dbf
