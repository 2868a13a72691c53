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
#include <vector>

#include "dbf/bezier.hpp"
#include "dbf/envelope.hpp"
#include "dbf/track.hpp"

namespace dbf {

inline constexpr double kDefaultCentripetalLimit = 26.5;  // m/s^2
inline constexpr double kDefaultStationSpacing = 1.5;     // m
inline constexpr double kDefaultHorizon = 2.25;           // s

/// Optimal raceline: points spaced `spacing` apart around a closed loop with
/// signed curvature, speed and cumulative time at each point (t_0 = 0).
struct RacelineProfile {
  std::vector<Vec2> points;
  std::vector<double> curvatures;
  std::vector<double> speeds;
  std::vector<double> times;
  double spacing = kDefaultStationSpacing;
  bool closed = true;

  std::size_t size() const { return points.size(); }
  /// Time to drive the whole loop, including the closing segment.
  double lap_time() const;
  double segment_time(std::size_t i) const;  // i -> i+1 (wrapping)
};

/// Signed circumcircle curvature of each consecutive (wrapping) triple of a
/// closed polyline, left turns positive; 0 for collinear triples.
/// Throws ValidationError for fewer than 3 points or duplicate neighbours.
std::vector<double> discrete_curvature(std::span<const Vec2> points);

struct MinCurvatureResult {
  std::vector<Vec2> path;
  std::vector<double> offsets;  // lateral offset of each station, left positive
  int iterations = 0;
  bool converged = false;
};

/// Closed path through the track stations shifted along their normals,
/// minimizing the sum of squared curvature with every offset at least
/// `margin` inside the boundaries. Iterates linearized box QPs until the
/// largest offset update drops below 1e-3 m or `iterations` is reached.
/// Throws SolverError if margin >= the narrowest half-width.
MinCurvatureResult min_curvature_path(const Track& track, double margin, int iterations = 50);

/// Resamples a closed polyline at (nearly) uniform arclength through a
/// periodic cubic spline. The resulting spacing is length / ceil(length / spacing).
std::vector<Vec2> resample_closed(std::span<const Vec2> points, double spacing);

/// Pointwise-maximal speeds on a closed path subject to v^2 |kappa| <= a_c_max
/// and a_min(v_{i-1}) <= (v_i^2 - v_{i-1}^2) / (2 dr) <= a_max(v_{i-1}).
/// Throws SolverError if the sweeps have not reached a fixed point after
/// `max_sweeps`.
RacelineProfile optimize_speed_profile(std::span<const Vec2> path, const AccelEnvelope& envelope,
                                       double a_c_max = kDefaultCentripetalLimit, int max_sweeps = 100);

struct ProfileResiduals {
  double centripetal = 0.0;   // max(v^2 |kappa| - a_c_max), <= 0 when feasible
  double longitudinal = 0.0;  // max envelope excess of the per-step a_l
  double timing = 0.0;        // max |dt_i - dr / mean(v)|
};

/// Recomputes every constraint on a profile.
ProfileResiduals profile_residuals(const RacelineProfile& profile, const AccelEnvelope& envelope,
                                   double a_c_max = kDefaultCentripetalLimit);

struct RacelineOptions {
  double margin = 1.5;
  int qp_iterations = 50;
  double spacing = kDefaultStationSpacing;
  double a_c_max = kDefaultCentripetalLimit;
};

/// Min-curvature path, resampling and speed optimization in one call.
RacelineProfile build_raceline(const Track& track, const AccelEnvelope& envelope, const RacelineOptions& options);

double sum_squared_curvature(std::span<const double> curvatures);

/// Order-`order` clamped Bézier over `horizon` seconds of raceline starting at
/// the raceline point nearest `start_position`; parameters are proportional
/// to elapsed profile time and delta_t = horizon. Fitted to raceline position,
/// velocity and acceleration at `fit_samples` uniform times.
BezierCurve raceline_segment(const RacelineProfile& profile, const Vec2& start_position,
                             double horizon = kDefaultHorizon, int order = 7, int fit_samples = 46);

struct RacelineState {
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
};

/// Raceline kinematics at a profile time (wrapping the lap), assuming
/// constant longitudinal acceleration between points; heading and curvature
/// are blended linearly across each segment.
RacelineState raceline_state_at_time(const RacelineProfile& profile, double t);

/// Position on the raceline at a profile time (wrapping the lap).
Vec2 raceline_position_at_time(const RacelineProfile& profile, double t);

/// Nearest point on the closed raceline polyline as a profile time.
double raceline_time_near(const RacelineProfile& profile, const Vec2& point);

}  // namespace dbf
