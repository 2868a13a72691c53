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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dbf/bezier.hpp"
#include "dbf/envelope.hpp"
#include "dbf/filter.hpp"
#include "dbf/raceline.hpp"
#include "dbf/track.hpp"

namespace dbf {

struct VehicleState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;  // rad, (-pi, pi]
  double speed = 0.0;    // m/s, >= 0
  double lap_distance = 0.0;  // centerline progress since the start, m
  double time = 0.0;
};

struct SimConfig {
  double dt = 0.01;
  double replan_period = 0.1;
  double k_v = 2.0;               // 1/s
  double speed_lookahead = 0.0;   // s
  bool accel_feedforward = true;  // add the plan's own a_l at the vehicle
  bool grip_governor = true;      // lift when the steering demand exceeds grip
  bool anchor_at_vehicle = true;  // shift plans so they start at the vehicle
  bool anchor_velocity = true;    // and leave it at the vehicle's velocity
  bool anchor_acceleration = false;  // and with the vehicle's last acceleration
  double lookahead_gain = 0.4;    // s
  double lookahead_min = 2.0;     // m
  double grip_limit = kDefaultCentripetalLimit;  // m/s^2, plant lateral limit
  double spin_factor = 1.15;
  double spin_duration = 0.2;     // s
  int plan_samples = 101;
  double prior_noise = 0.25;      // m
  double prior_horizon = kDefaultHorizon;
  int prior_order = 7;
  double unstable_scale = 1.15;
  double timeout_factor = 4.0;    // abort a lap after this many raceline lap times
  VehicleFootprint footprint;

  void validate() const;
};

enum class PlannerKind { GroundTruth, UnfilteredPrior, DbfFiltered, UnstablePrior };

/// "ground-truth", "unfiltered", "dbf", "unstable". Throws ConfigError.
PlannerKind parse_planner(const std::string& name);
std::string planner_name(PlannerKind kind);

/// A plan curve sampled into a polyline with time, speed and arclength.
struct PlanPath {
  std::vector<Vec2> points;
  std::vector<double> arclength;
  std::vector<double> times;
  std::vector<double> speeds;
  std::vector<double> accels;  // longitudinal

  static PlanPath from_curve(const BezierCurve& curve, int samples);
  double length() const { return arclength.back(); }
  /// Nearest point on the polyline: arclength and time there.
  void nearest(const Vec2& p, double& arc, double& time) const;
  Vec2 point_at_arclength(double arc) const;
  double speed_at_time(double t) const;
  double accel_at_time(double t) const;
};

/// Adds (1 - i/k) (position - C0) to control point i, moving the curve by
/// (1 - s) times the offset: it starts at `position`, ends where it did, and
/// its second derivative is unchanged. With `velocity`, C1 is then set so the
/// starting velocity equals it, and with `acceleration` also C2.
BezierCurve anchor_curve(const BezierCurve& curve, const Vec2& position, const Vec2* velocity = nullptr,
                         const Vec2* acceleration = nullptr);
ProbBezierCurve anchor_curve(const ProbBezierCurve& curve, const Vec2& position, const Vec2* velocity = nullptr,
                             const Vec2* acceleration = nullptr);

/// Curvature command of a pure-pursuit tracker with lookahead
/// max(gain * speed, min) measured along the plan from its closest point.
double pure_pursuit(const VehicleState& state, const PlanPath& plan, const SimConfig& cfg);
double pure_pursuit(const VehicleState& state, const BezierCurve& plan, const SimConfig& cfg);

/// k_v (v_plan(t_near + lookahead) - speed), plus the plan's longitudinal
/// acceleration at t_near when feedforward is on, clamped to the envelope.
double speed_controller(const VehicleState& state, const PlanPath& plan, const AccelEnvelope& envelope,
                        const SimConfig& cfg, double kappa_cmd = 0.0, double a_c_max = kDefaultCentripetalLimit);

struct StepResult {
  VehicleState state;
  double a_long = 0.0;         // applied
  double a_cent = 0.0;         // applied, signed (left positive)
  double a_cent_demand = 0.0;  // signed
  bool saturated = false;
};

/// Point mass with heading: longitudinal accel clamps to the envelope (and
/// never reverses), lateral accel saturates at a_c_max. Speed is integrated
/// first, then heading and position with the new speed.
StepResult step_vehicle(const VehicleState& state, double kappa_cmd, double a_cmd, double dt,
                        const AccelEnvelope& envelope, double a_c_max);

struct TraceRow {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double v = 0.0;
  double a_l = 0.0;
  double a_c = 0.0;         // |applied|
  double a_c_demand = 0.0;  // |demanded|
  double d_signed = 0.0;
  int corners_out = 0;
  double station = 0.0;     // centerline arclength of the projection
};

/// Streaming excursion and spin-out detection at fixed dt.
class EventDetector {
 public:
  EventDetector(double dt, double a_c_max, double spin_factor, double spin_duration);
  /// Returns true on the step an excursion starts.
  bool push(const TraceRow& row);
  int boundary_failures() const { return failures_; }
  bool spin_out() const { return spin_out_; }
  double spin_time() const { return spin_time_; }

 private:
  double dt_, threshold_;
  int spin_steps_;
  int over_steps_ = 0;
  bool outside_ = false;
  int failures_ = 0;
  bool spin_out_ = false;
  double spin_time_ = 0.0;
};

struct EventSummary {
  int boundary_failures = 0;
  bool spin_out = false;
};

EventSummary detect_events(std::span<const TraceRow> history, double dt, double a_c_max, double spin_factor = 1.15,
                           double spin_duration = 0.2);

struct LapMetrics {
  int lap = 0;
  double lap_time = 0.0;
  double average_speed = 0.0;  // traversed path length / lap_time
  double distance = 0.0;       // traversed path length
  int boundary_failures = 0;
  bool spin_out = false;
  bool completed = false;
  double max_a_c = 0.0;
  double min_a_l = 0.0;
  double max_a_l = 0.0;
};

struct DbfSummary {
  int plans = 0;
  double mean_ess = 0.0;
  double mean_iterations = 0.0;
  double max_posterior_delta_a_c = 0.0;
  double max_posterior_delta_a_l = 0.0;
  double max_posterior_d = 0.0;
};

struct EpisodeResult {
  PlannerKind planner = PlannerKind::GroundTruth;
  std::vector<LapMetrics> laps;
  std::vector<TraceRow> trace;
  bool spin_out = false;
  double spin_time = 0.0;
  DbfSummary dbf;
  std::vector<double> planning_ms;  // wall clock per planning cycle, not part of any metrics file
};

/// Called with the vehicle state and the new plan at every replan.
using PlanObserver = std::function<void(const VehicleState&, const BezierCurve&)>;

/// Starts on the first raceline point at raceline speed and drives `laps`
/// laps, replanning every cfg.replan_period. Ends early on spin-out or when
/// a lap exceeds the timeout.
EpisodeResult run_episode(PlannerKind planner, const Track& track, const RacelineProfile& profile,
                          const AccelEnvelope& envelope, const DbfConfig& dbf_cfg, const SimConfig& cfg, int laps,
                          std::uint64_t seed, const PlanObserver& observer = {});

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace);

}  // namespace dbf
