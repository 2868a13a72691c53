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

#include <cstdint>
#include <utility>
#include <vector>

namespace dbf {

/// Piecewise-linear table y(x) over strictly increasing breakpoints; queries
/// outside the range clamp to the end values.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> points);

  double operator()(double x) const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

/// Speed-dependent longitudinal limits: a_max(v) >= 0 throttle, a_min(v) < 0
/// braking. The two tables may use different speed breakpoints.
class AccelEnvelope {
 public:
  /// Throws ValidationError unless a_max is nonincreasing, starts at v = 0
  /// and reaches 0 at its last breakpoint (the top speed), and a_min is
  /// negative and nonincreasing.
  AccelEnvelope(PiecewiseLinear a_max, PiecewiseLinear a_min);

  double a_max(double speed) const { return a_max_(speed); }
  double a_min(double speed) const { return a_min_(speed); }
  double top_speed() const { return a_max_.points().back().first; }
  /// Largest |a| across both tables.
  double max_abs() const;
  const PiecewiseLinear& a_max_table() const { return a_max_; }
  const PiecewiseLinear& a_min_table() const { return a_min_; }

  /// FNV-1a over the breakpoints' bit patterns.
  std::uint64_t hash() const;

 private:
  PiecewiseLinear a_max_;
  PiecewiseLinear a_min_;
};

/// Synthetic stand-in table: a_max (0,16) (30,12) (60,6) (90,0),
/// a_min (0,-28) (40,-34) (90,-40).
AccelEnvelope default_envelope();

}  // namespace dbf
