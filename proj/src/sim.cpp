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

#include "dbf/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "dbf/errors.hpp"
#include "dbf/geometry.hpp"

namespace dbf {

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double span = xs[i] - xs[i - 1];
  const double f = span > 0.0 ? (x - xs[i - 1]) / span : 0.0;
  return ys[i - 1] + f * (ys[i] - ys[i - 1]);
}

double wrap_progress(double delta, double length) {
  if (delta > 0.5 * length) return delta - length;
  if (delta <= -0.5 * length) return delta + length;
  return delta;
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0 && dt <= 0.05)) throw ValidationError("sim dt must be in (0, 0.05] s");
  if (!(replan_period >= dt)) throw ValidationError("sim replan_period must be >= dt");
  if (!(k_v > 0.0)) throw ValidationError("sim k_v must be > 0");
  if (!(speed_lookahead >= 0.0)) throw ValidationError("sim speed_lookahead must be >= 0");
  if (!(lookahead_gain >= 0.0) || !(lookahead_min > 0.0)) throw ValidationError("sim lookahead must be positive");
  if (!(grip_limit > 0.0)) throw ValidationError("sim grip_limit must be > 0");
  if (!(spin_factor > 1.0) || !(spin_duration > 0.0)) throw ValidationError("sim spin rule must exceed the limit");
  if (plan_samples < 4) throw ValidationError("sim plan_samples must be >= 4");
  if (!(prior_noise >= 0.0)) throw ValidationError("sim prior_noise must be >= 0");
  if (!(prior_horizon > 0.0)) throw ValidationError("sim prior_horizon must be > 0");
  if (prior_order < 2) throw ValidationError("sim prior_order must be >= 2");
  if (!(unstable_scale > 0.0)) throw ValidationError("sim unstable_scale must be > 0");
  if (!(timeout_factor > 1.0)) throw ValidationError("sim timeout_factor must be > 1");
  if (!(footprint.length > 0.0 && footprint.width > 0.0)) throw ValidationError("sim footprint must be positive");
}

PlannerKind parse_planner(const std::string& name) {
  if (name == "ground-truth") return PlannerKind::GroundTruth;
  if (name == "unfiltered") return PlannerKind::UnfilteredPrior;
  if (name == "dbf") return PlannerKind::DbfFiltered;
  if (name == "unstable") return PlannerKind::UnstablePrior;
  throw ConfigError("unknown planner '" + name + "' (expected ground-truth, unfiltered, dbf or unstable)");
}

std::string planner_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::GroundTruth: return "ground-truth";
    case PlannerKind::UnfilteredPrior: return "unfiltered";
    case PlannerKind::DbfFiltered: return "dbf";
    case PlannerKind::UnstablePrior: return "unstable";
  }
  return "unknown";
}

PlanPath PlanPath::from_curve(const BezierCurve& curve, int samples) {
  if (samples < 2) throw DomainError("plan path needs at least 2 samples");
  PlanPath p;
  const BezierCurve d1 = derivative(curve);
  const BezierCurve d2 = derivative(d1);
  const double inv_dt = 1.0 / curve.delta_t();
  for (int j = 0; j < samples; ++j) {
    const double s = j == samples - 1 ? 1.0 : static_cast<double>(j) / (samples - 1);
    p.points.push_back(evaluate(curve, s));
    p.times.push_back(s * curve.delta_t());
    const Vec2 vel = inv_dt * evaluate(d1, s);
    const Vec2 acc = (inv_dt * inv_dt) * evaluate(d2, s);
    const double speed = vel.norm();
    p.speeds.push_back(speed);
    p.accels.push_back(speed > kDegenerateSpeed ? vel.dot(acc) / speed : 0.0);
    p.arclength.push_back(j == 0 ? 0.0 : p.arclength.back() + (p.points[j] - p.points[j - 1]).norm());
  }
  return p;
}

void PlanPath::nearest(const Vec2& q, double& arc, double& time) const {
  double best = std::numeric_limits<double>::infinity();
  arc = 0.0;
  time = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 seg = points[i + 1] - points[i];
    const double len2 = seg.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((q - points[i]).dot(seg) / len2, 0.0, 1.0) : 0.0;
    const double d2 = (points[i] + t * seg - q).squaredNorm();
    if (d2 < best) {
      best = d2;
      arc = arclength[i] + t * (arclength[i + 1] - arclength[i]);
      time = times[i] + t * (times[i + 1] - times[i]);
    }
  }
}

Vec2 PlanPath::point_at_arclength(double arc) const {
  if (arc <= 0.0) return points.front();
  if (arc >= arclength.back()) return points.back();
  const auto it = std::upper_bound(arclength.begin(), arclength.end(), arc);
  const auto i = static_cast<std::size_t>(it - arclength.begin());
  const double span = arclength[i] - arclength[i - 1];
  const double f = span > 0.0 ? (arc - arclength[i - 1]) / span : 0.0;
  return points[i - 1] + f * (points[i] - points[i - 1]);
}

double PlanPath::speed_at_time(double t) const { return interp(times, speeds, t); }

double PlanPath::accel_at_time(double t) const { return interp(times, accels, t); }

namespace {

std::vector<Vec2> anchored_points(std::span<const Vec2> cps, double delta_t, const Vec2& position,
                                  const Vec2* velocity, const Vec2* acceleration) {
  std::vector<Vec2> out(cps.begin(), cps.end());
  const int k = static_cast<int>(out.size()) - 1;
  const Vec2 offset = position - out.front();
  for (int i = 0; i <= k; ++i) {
    const double w = k == 0 ? 1.0 : 1.0 - static_cast<double>(i) / k;
    out[static_cast<std::size_t>(i)] += w * offset;
  }
  out.front() = position;
  if (velocity != nullptr && k >= 1) out[1] = position + *velocity * (delta_t / k);
  if (velocity != nullptr && acceleration != nullptr && k >= 2)
    out[2] = 2.0 * out[1] - out[0] + *acceleration * (delta_t * delta_t / (k * (k - 1)));
  return out;
}

}  // namespace

BezierCurve anchor_curve(const BezierCurve& curve, const Vec2& position, const Vec2* velocity,
                         const Vec2* acceleration) {
  return BezierCurve(anchored_points(curve.control_points(), curve.delta_t(), position, velocity, acceleration),
                     curve.delta_t());
}

ProbBezierCurve anchor_curve(const ProbBezierCurve& curve, const Vec2& position, const Vec2* velocity,
                             const Vec2* acceleration) {
  const auto cov = curve.covariances();
  return ProbBezierCurve(anchored_points(curve.means(), curve.delta_t(), position, velocity, acceleration),
                         std::vector<Mat2>(cov.begin(), cov.end()),
                         curve.delta_t());
}

double pure_pursuit(const VehicleState& state, const PlanPath& plan, const SimConfig& cfg) {
  const double ld = std::max(cfg.lookahead_gain * state.speed, cfg.lookahead_min);
  double arc = 0.0, t = 0.0;
  plan.nearest(state.position, arc, t);
  const Vec2 goal = plan.point_at_arclength(arc + ld);
  const Vec2 to_goal = goal - state.position;
  const double dist = to_goal.norm();
  if (!(dist > 1e-9)) return 0.0;
  const double alpha = normalize_angle(std::atan2(to_goal.y(), to_goal.x()) - state.heading);
  return 2.0 * std::sin(alpha) / dist;
}

double pure_pursuit(const VehicleState& state, const BezierCurve& plan, const SimConfig& cfg) {
  return pure_pursuit(state, PlanPath::from_curve(plan, cfg.plan_samples), cfg);
}

double speed_controller(const VehicleState& state, const PlanPath& plan, const AccelEnvelope& envelope,
                        const SimConfig& cfg, double kappa_cmd, double a_c_max) {
  double arc = 0.0, t = 0.0;
  plan.nearest(state.position, arc, t);
  const double target = plan.speed_at_time(t + cfg.speed_lookahead);
  double a = cfg.k_v * (target - state.speed);
  if (cfg.accel_feedforward) a += plan.accel_at_time(t);
  if (cfg.grip_governor && std::abs(kappa_cmd) > 0.0) {
    const double grip_speed = std::sqrt(a_c_max / std::abs(kappa_cmd));
    if (state.speed > grip_speed) a = std::min(a, cfg.k_v * (grip_speed - state.speed));
  }
  return std::clamp(a, envelope.a_min(state.speed), envelope.a_max(state.speed));
}

StepResult step_vehicle(const VehicleState& state, double kappa_cmd, double a_cmd, double dt,
                        const AccelEnvelope& envelope, double a_c_max) {
  if (!(dt > 0.0 && dt <= 0.05)) throw DomainError("vehicle step dt must be in (0, 0.05] s");
  StepResult r;
  double a_l = std::clamp(a_cmd, envelope.a_min(state.speed), envelope.a_max(state.speed));
  if (state.speed + a_l * dt < 0.0) a_l = -state.speed / dt;
  const double v = state.speed + a_l * dt;

  const double demand = v * v * kappa_cmd;
  double applied = demand;
  if (std::abs(demand) > a_c_max) {
    applied = std::copysign(a_c_max, demand);
    r.saturated = true;
  }
  const double yaw_rate = v > 0.0 ? applied / v : 0.0;

  r.state = state;
  r.state.speed = v;
  r.state.heading = normalize_angle(state.heading + yaw_rate * dt);
  r.state.position = state.position + (v * dt) * Vec2(std::cos(r.state.heading), std::sin(r.state.heading));
  r.state.time = state.time + dt;
  r.a_long = a_l;
  r.a_cent = applied;
  r.a_cent_demand = demand;
  return r;
}

EventDetector::EventDetector(double dt, double a_c_max, double spin_factor, double spin_duration)
    : dt_(dt), threshold_(spin_factor * a_c_max),
      spin_steps_(std::max(1, static_cast<int>(std::ceil(spin_duration / dt - 1e-9)))) {}

bool EventDetector::push(const TraceRow& row) {
  bool started = false;
  const bool out = row.corners_out >= 3;
  if (out && !outside_) {
    ++failures_;
    started = true;
  }
  outside_ = out;
  if (row.a_c_demand > threshold_) {
    ++over_steps_;
    if (over_steps_ >= spin_steps_ && !spin_out_) {
      spin_out_ = true;
      spin_time_ = row.t;
    }
  } else {
    over_steps_ = 0;
  }
  (void)dt_;
  return started;
}

EventSummary detect_events(std::span<const TraceRow> history, double dt, double a_c_max, double spin_factor,
                           double spin_duration) {
  EventDetector det(dt, a_c_max, spin_factor, spin_duration);
  for (const auto& row : history) det.push(row);
  return {det.boundary_failures(), det.spin_out()};
}

EpisodeResult run_episode(PlannerKind planner, const Track& track, const RacelineProfile& profile,
                          const AccelEnvelope& envelope, const DbfConfig& dbf_cfg, const SimConfig& cfg, int laps,
                          std::uint64_t seed, const PlanObserver& observer) {
  cfg.validate();
  dbf_cfg.validate();
  if (laps < 0) throw ValidationError("laps must be >= 0");
  if (profile.size() < 3) throw ValidationError("raceline profile too short");
  EpisodeResult result;
  result.planner = planner;
  if (laps == 0) return result;

  RandomStream prior_rng = RandomStream::substream(seed, 1);
  RandomStream filter_rng = RandomStream::substream(seed, 2);
  const Evidence ev{track, envelope, dbf_cfg.a_c_max, dbf_cfg.d_min};
  DbfConfig filter_cfg = dbf_cfg;
  if (cfg.anchor_at_vehicle && cfg.anchor_velocity)
    filter_cfg.pinned_points = std::max(filter_cfg.pinned_points, cfg.anchor_acceleration ? 3 : 2);

  VehicleState state;
  state.position = profile.points[0];
  const Vec2 dir = profile.points[1] - profile.points[0];
  state.heading = std::atan2(dir.y(), dir.x());
  state.speed = profile.speeds[0];
  double station = track.project(state.position).station_arclength;

  EventDetector detector(cfg.dt, cfg.grip_limit, cfg.spin_factor, cfg.spin_duration);
  const double length = track.total_length();
  const double timeout = cfg.timeout_factor * profile.lap_time();
  const auto replan_steps = static_cast<long>(std::llround(cfg.replan_period / cfg.dt));

  LapMetrics lap;
  lap.lap = 0;
  lap.min_a_l = 0.0;
  double lap_start = 0.0;
  PlanPath plan;
  Vec2 last_accel = Vec2::Zero();
  double ess_sum = 0.0, iter_sum = 0.0;

  for (long step = 0;; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool replan = step % replan_steps == 0;
    if (replan) {
      const Vec2 velocity = state.speed * Vec2(std::cos(state.heading), std::sin(state.heading));
      auto anchor = [&](const auto& c) {
        if (!cfg.anchor_at_vehicle) return c;
        return anchor_curve(c, state.position, cfg.anchor_velocity ? &velocity : nullptr,
                            cfg.anchor_velocity && cfg.anchor_acceleration ? &last_accel : nullptr);
      };
      BezierCurve curve = [&]() -> BezierCurve {
        switch (planner) {
          case PlannerKind::GroundTruth:
            return anchor(raceline_segment(profile, state.position, cfg.prior_horizon, cfg.prior_order));
          case PlannerKind::UnfilteredPrior:
            return anchor(oracle_prior(profile, state.position, dbf_cfg, 1.0, cfg.prior_noise, prior_rng,
                                       cfg.prior_horizon, cfg.prior_order).mean_curve());
          case PlannerKind::UnstablePrior:
            return anchor(oracle_prior(profile, state.position, dbf_cfg, cfg.unstable_scale, cfg.prior_noise,
                                       prior_rng, cfg.prior_horizon, cfg.prior_order).mean_curve());
          case PlannerKind::DbfFiltered: {
            const ProbBezierCurve prior = anchor(oracle_prior(profile, state.position, dbf_cfg, dbf_cfg.speed_scale,
                                                              cfg.prior_noise, prior_rng, cfg.prior_horizon,
                                                              cfg.prior_order));
            std::vector<DbfDiagnostics> diags;
            BezierCurve post = dbf_run(prior, ev, filter_cfg, filter_rng, &diags);
            DbfSummary& s = result.dbf;
            const DbfDiagnostics& last = diags.back();
            s.max_posterior_delta_a_c = s.plans == 0 ? last.posterior.delta_a_c
                                                    : std::max(s.max_posterior_delta_a_c, last.posterior.delta_a_c);
            s.max_posterior_delta_a_l = s.plans == 0 ? last.posterior.delta_a_l
                                                    : std::max(s.max_posterior_delta_a_l, last.posterior.delta_a_l);
            s.max_posterior_d = s.plans == 0 ? last.posterior.distance
                                            : std::max(s.max_posterior_d, last.posterior.distance);
            ++s.plans;
            ess_sum += last.ess;
            iter_sum += static_cast<double>(diags.size());
            return post;
          }
        }
        throw ValidationError("unknown planner");
      }();
      plan = PlanPath::from_curve(curve, cfg.plan_samples);
      if (observer) observer(state, curve);
    }
    const double kappa = pure_pursuit(state, plan, cfg);
    if (replan) {
      const auto t1 = std::chrono::steady_clock::now();
      result.planning_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    const double a_cmd = speed_controller(state, plan, envelope, cfg, kappa, cfg.grip_limit);
    const StepResult sr = step_vehicle(state, kappa, a_cmd, cfg.dt, envelope, cfg.grip_limit);
    last_accel = sr.a_long * Vec2(std::cos(sr.state.heading), std::sin(sr.state.heading)) +
                 sr.a_cent * Vec2(-std::sin(sr.state.heading), std::cos(sr.state.heading));

    const double step_len = (sr.state.position - state.position).norm();
    const double prev_progress = state.lap_distance;
    const TrackProjection proj = track.project(sr.state.position);
    VehicleState next = sr.state;
    next.lap_distance = prev_progress + wrap_progress(proj.station_arclength - station, length);
    station = proj.station_arclength;

    TraceRow row;
    row.t = next.time;
    row.x = next.position.x();
    row.y = next.position.y();
    row.heading = next.heading;
    row.v = next.speed;
    row.a_l = sr.a_long;
    row.a_c = std::abs(sr.a_cent);
    row.a_c_demand = std::abs(sr.a_cent_demand);
    row.d_signed = track.signed_distance(next.position);
    row.corners_out = footprint_violation(track, Pose2{next.position, next.heading}, cfg.footprint);
    row.station = proj.station_arclength;
    result.trace.push_back(row);

    if (detector.push(row)) ++lap.boundary_failures;
    lap.max_a_c = std::max(lap.max_a_c, row.a_c);
    lap.min_a_l = std::min(lap.min_a_l, row.a_l);
    lap.max_a_l = std::max(lap.max_a_l, row.a_l);

    const double target = static_cast<double>(lap.lap + 1) * length;
    if (next.lap_distance >= target && prev_progress < target) {
      const double f = (target - prev_progress) / (next.lap_distance - prev_progress);
      const double t_cross = state.time + f * cfg.dt;
      lap.distance += f * step_len;
      lap.lap_time = t_cross - lap_start;
      lap.average_speed = lap.distance / lap.lap_time;
      lap.completed = true;
      result.laps.push_back(lap);
      const int done = lap.lap + 1;
      lap = LapMetrics{};
      lap.lap = done;
      lap.distance = (1.0 - f) * step_len;
      lap_start = t_cross;
      if (done >= laps) break;
    } else {
      lap.distance += step_len;
    }
    state = next;

    if (detector.spin_out()) {
      result.spin_out = true;
      result.spin_time = detector.spin_time();
      lap.spin_out = true;
      lap.lap_time = next.time - lap_start;
      lap.average_speed = lap.lap_time > 0.0 ? lap.distance / lap.lap_time : 0.0;
      result.laps.push_back(lap);
      break;
    }
    if (next.time - lap_start > timeout) {
      lap.lap_time = next.time - lap_start;
      lap.average_speed = lap.distance / lap.lap_time;
      result.laps.push_back(lap);
      break;
    }
  }
  if (result.dbf.plans > 0) {
    result.dbf.mean_ess = ess_sum / result.dbf.plans;
    result.dbf.mean_iterations = iter_sum / result.dbf.plans;
  }
  return result;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace) {
  os << "t_s,x_m,y_m,heading_rad,v_mps,a_l_mps2,a_c_mps2,a_c_demand_mps2,d_signed_m\n";
  os.precision(10);
  for (const auto& r : trace) {
    os << r.t << ',' << r.x << ',' << r.y << ',' << r.heading << ',' << r.v << ',' << r.a_l << ',' << r.a_c << ','
       << r.a_c_demand << ',' << r.d_signed << '\n';
  }
}

}  // namespace dbf
