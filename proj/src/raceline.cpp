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

#include "dbf/raceline.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dbf/box_qp.hpp"
#include "dbf/errors.hpp"

namespace dbf {

namespace {

double circumcircle_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ab = (b - a).norm();
  const double bc = (c - b).norm();
  const double ca = (a - c).norm();
  const double denom = ab * bc * ca;
  if (denom == 0.0) return 0.0;
  return 2.0 * cross(b - a, c - b) / denom;
}

std::vector<double> curvature_of_offsets(const Track& track, const Eigen::VectorXd& alpha,
                                         std::vector<Vec2>& scratch) {
  const std::size_t n = track.size();
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    scratch[i] = track.station(i) + alpha(static_cast<Eigen::Index>(i)) * track.station_normal(i);
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i)
    k[i] = circumcircle_curvature(scratch[(i + n - 1) % n], scratch[i], scratch[(i + 1) % n]);
  return k;
}

// Periodic cubic spline through closed-loop knots, parameterized by
// cumulative chord length.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(std::span<const Vec2> knots) : knots_(knots.begin(), knots.end()) {
    const std::size_t n = knots_.size();
    h_.resize(n);
    u_.resize(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      h_[i] = (knots_[(i + 1) % n] - knots_[i]).norm();
      if (!(h_[i] > 0.0)) throw ValidationError("spline knots contain duplicates");
      u_[i + 1] = u_[i] + h_[i];
    }
    // Cyclic tridiagonal system for the knot second derivatives.
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n;
      const std::size_t ip = (i + 1) % n;
      const auto r = static_cast<Eigen::Index>(i);
      trip.emplace_back(r, static_cast<Eigen::Index>(im), h_[im]);
      trip.emplace_back(r, r, 2.0 * (h_[im] + h_[i]));
      trip.emplace_back(r, static_cast<Eigen::Index>(ip), h_[i]);
      const Vec2 slope = 6.0 * ((knots_[ip] - knots_[i]) / h_[i] - (knots_[i] - knots_[im]) / h_[im]);
      rhs.row(r) = slope.transpose();
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw SolverError("periodic spline system is singular");
    const Eigen::MatrixXd m = ldlt.solve(rhs);
    second_.resize(n);
    for (std::size_t i = 0; i < n; ++i) second_[i] = m.row(static_cast<Eigen::Index>(i)).transpose();
  }

  double period() const { return u_.back(); }

  Vec2 operator()(double u) const {
    const std::size_t n = knots_.size();
    u = std::fmod(u, period());
    if (u < 0.0) u += period();
    auto it = std::upper_bound(u_.begin(), u_.end(), u);
    std::size_t i = static_cast<std::size_t>(std::distance(u_.begin(), it)) - 1;
    i = std::min(i, n - 1);
    const std::size_t j = (i + 1) % n;
    const double h = h_[i];
    const double a = (u_[i + 1] - u) / h;
    const double b = (u - u_[i]) / h;
    return a * knots_[i] + b * knots_[j] +
           ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[j]) * (h * h / 6.0);
  }

 private:
  std::vector<Vec2> knots_;
  std::vector<double> h_;
  std::vector<double> u_;
  std::vector<Vec2> second_;
};

// Largest w in [0, w_hi] with w + 2 dr a_min(sqrt(w)) <= target.
double backward_limit(double target, double w_hi, double dr, const AccelEnvelope& env) {
  auto excess = [&](double w) { return w + 2.0 * dr * env.a_min(std::sqrt(w)) - target; };
  if (excess(w_hi) <= 0.0) return w_hi;
  double lo = 0.0;
  double hi = w_hi;
  if (excess(lo) > 0.0) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) <= 0.0) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace

double RacelineProfile::segment_time(std::size_t i) const {
  const std::size_t j = (i + 1) % size();
  return spacing / (0.5 * (speeds[i] + speeds[j]));
}

double RacelineProfile::lap_time() const { return times.back() + segment_time(size() - 1); }

std::vector<double> discrete_curvature(std::span<const Vec2> points) {
  const std::size_t n = points.size();
  if (n < 3) throw ValidationError("curvature needs at least 3 points");
  for (std::size_t i = 0; i < n; ++i)
    if ((points[(i + 1) % n] - points[i]).norm() == 0.0)
      throw ValidationError("duplicate adjacent points at index " + std::to_string(i));
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i)
    k[i] = circumcircle_curvature(points[(i + n - 1) % n], points[i], points[(i + 1) % n]);
  return k;
}

double sum_squared_curvature(std::span<const double> curvatures) {
  double s = 0.0;
  for (double k : curvatures) s += k * k;
  return s;
}

MinCurvatureResult min_curvature_path(const Track& track, double margin, int iterations) {
  const std::size_t n = track.size();
  const auto N = static_cast<Eigen::Index>(n);
  if (!(margin >= 0.0)) throw SolverError("margin must be nonnegative");
  Eigen::VectorXd lo(N), hi(N);
  for (std::size_t i = 0; i < n; ++i) {
    lo(static_cast<Eigen::Index>(i)) = -(track.half_width_right(i) - margin);
    hi(static_cast<Eigen::Index>(i)) = track.half_width_left(i) - margin;
    if (!(lo(static_cast<Eigen::Index>(i)) < hi(static_cast<Eigen::Index>(i))))
      throw SolverError("min-curvature QP infeasible: margin leaves no room at station " + std::to_string(i));
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(N).cwiseMax(lo).cwiseMin(hi);
  std::vector<Vec2> scratch;
  std::vector<double> kappa = curvature_of_offsets(track, alpha, scratch);
  double objective = sum_squared_curvature(kappa);
  constexpr double kFdStep = 1e-6;
  constexpr double kDamping = 1e-8;

  MinCurvatureResult result;
  for (int it = 0; it < iterations; ++it) {
    // Jacobian of curvature w.r.t. the three offsets each triple depends on.
    std::vector<Eigen::Triplet<double>> jac;
    jac.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t nbr[3] = {(i + n - 1) % n, i, (i + 1) % n};
      for (std::size_t c = 0; c < 3; ++c) {
        Vec2 p[3];
        Vec2 q[3];
        for (std::size_t m = 0; m < 3; ++m) {
          const auto idx = static_cast<Eigen::Index>(nbr[m]);
          const double off = alpha(idx) + (m == c ? kFdStep : 0.0);
          const double off_m = alpha(idx) - (m == c ? kFdStep : 0.0);
          p[m] = track.station(nbr[m]) + off * track.station_normal(nbr[m]);
          q[m] = track.station(nbr[m]) + off_m * track.station_normal(nbr[m]);
        }
        const double d = (circumcircle_curvature(p[0], p[1], p[2]) - circumcircle_curvature(q[0], q[1], q[2])) /
                         (2.0 * kFdStep);
        jac.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nbr[c]), d);
      }
    }
    Eigen::SparseMatrix<double> J(N, N);
    J.setFromTriplets(jac.begin(), jac.end());
    Eigen::SparseMatrix<double> H = Eigen::SparseMatrix<double>(J.transpose()) * J;
    Eigen::SparseMatrix<double> damping(N, N);
    damping.setIdentity();
    H += kDamping * damping;
    const Eigen::VectorXd k_vec = Eigen::Map<const Eigen::VectorXd>(kappa.data(), N);
    const Eigen::VectorXd g = J.transpose() * k_vec;
    const BoxQpResult qp = solve_box_qp(H, g, lo - alpha, hi - alpha);
    const Eigen::VectorXd step = qp.x;

    // Backtrack on the true objective.
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      const Eigen::VectorXd trial = (alpha + t * step).cwiseMax(lo).cwiseMin(hi);
      std::vector<double> k_trial = curvature_of_offsets(track, trial, scratch);
      const double f = sum_squared_curvature(k_trial);
      if (f < objective) {
        const double moved = (trial - alpha).cwiseAbs().maxCoeff();
        alpha = trial;
        kappa = std::move(k_trial);
        objective = f;
        accepted = true;
        result.iterations = it + 1;
        if (moved < 1e-3) result.converged = true;
        break;
      }
    }
    if (!accepted) {
      result.iterations = it + 1;
      result.converged = true;
    }
    if (result.converged) break;
  }

  result.offsets.assign(alpha.data(), alpha.data() + N);
  result.path.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    result.path[i] = track.station(i) + alpha(static_cast<Eigen::Index>(i)) * track.station_normal(i);
  return result;
}

std::vector<Vec2> resample_closed(std::span<const Vec2> points, double spacing) {
  if (points.size() < 3) throw ValidationError("resampling needs at least 3 points");
  if (!(spacing > 0.0)) throw ValidationError("resample spacing must be positive");
  const PeriodicSpline spline(points);

  // Dense arclength table of the spline.
  const std::size_t dense = points.size() * 16;
  std::vector<double> u(dense + 1), len(dense + 1, 0.0);
  Vec2 prev = spline(0.0);
  for (std::size_t j = 0; j <= dense; ++j) {
    u[j] = spline.period() * static_cast<double>(j) / static_cast<double>(dense);
    const Vec2 p = spline(u[j]);
    if (j > 0) len[j] = len[j - 1] + (p - prev).norm();
    prev = p;
  }
  const double total = len.back();
  const auto count = static_cast<std::size_t>(std::ceil(total / spacing - 1e-9));
  const double step = total / static_cast<double>(count);
  std::vector<Vec2> out;
  out.reserve(count);
  std::size_t k = 0;
  for (std::size_t m = 0; m < count; ++m) {
    const double target = step * static_cast<double>(m);
    while (k + 1 < dense && len[k + 1] < target) ++k;
    const double seg = len[k + 1] - len[k];
    const double f = seg > 0.0 ? (target - len[k]) / seg : 0.0;
    out.push_back(spline(u[k] + f * (u[k + 1] - u[k])));
  }
  return out;
}

RacelineProfile optimize_speed_profile(std::span<const Vec2> path, const AccelEnvelope& envelope, double a_c_max,
                                       int max_sweeps) {
  const std::size_t n = path.size();
  RacelineProfile prof;
  prof.points.assign(path.begin(), path.end());
  prof.curvatures = discrete_curvature(path);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < n; ++i) perimeter += (path[(i + 1) % n] - path[i]).norm();
  prof.spacing = perimeter / static_cast<double>(n);
  const double dr = prof.spacing;

  // Work in w = v^2.
  const double top = envelope.top_speed();
  std::vector<double> cap(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = std::abs(prof.curvatures[i]);
    cap[i] = k > 0.0 ? std::min(a_c_max / k, top * top) : top * top;
    w[i] = cap[i];
  }
  // Start the sweeps at the tightest point so the first pass already sees the
  // binding constraint.
  const std::size_t start =
      static_cast<std::size_t>(std::distance(cap.begin(), std::min_element(cap.begin(), cap.end())));

  bool fixed_point = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
      const std::size_t i = (start + m) % n;
      const std::size_t prev = (i + n - 1) % n;
      const double limit = w[prev] + 2.0 * dr * envelope.a_max(std::sqrt(w[prev]));
      if (w[i] > limit) {
        change = std::max(change, w[i] - limit);
        w[i] = limit;
      }
    }
    for (std::size_t m = 1; m <= n; ++m) {
      const std::size_t i = (start + n - m) % n;  // i is the upstream point
      const std::size_t next = (i + 1) % n;
      const double limit = backward_limit(w[next], w[i], dr, envelope);
      if (limit < w[i]) {
        change = std::max(change, w[i] - limit);
        w[i] = limit;
      }
    }
    if (change == 0.0) {
      fixed_point = true;
      break;
    }
  }
  if (!fixed_point) throw SolverError("speed profile did not reach a fixed point");

  prof.speeds.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    prof.speeds[i] = std::sqrt(w[i]);
    if (!(prof.speeds[i] > 0.0)) throw SolverError("speed profile reaches standstill");
  }
  prof.times.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) prof.times[i] = prof.times[i - 1] + prof.segment_time(i - 1);
  return prof;
}

ProfileResiduals profile_residuals(const RacelineProfile& p, const AccelEnvelope& env, double a_c_max) {
  ProfileResiduals r;
  r.centripetal = -std::numeric_limits<double>::infinity();
  r.longitudinal = -std::numeric_limits<double>::infinity();
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    r.centripetal = std::max(r.centripetal, p.speeds[i] * p.speeds[i] * std::abs(p.curvatures[i]) - a_c_max);
    const std::size_t prev = (i + n - 1) % n;
    if (!p.closed && i == 0) continue;
    const double v0 = p.speeds[prev];
    const double a = (p.speeds[i] * p.speeds[i] - v0 * v0) / (2.0 * p.spacing);
    r.longitudinal = std::max(r.longitudinal, std::max(a - env.a_max(v0), env.a_min(v0) - a));
    if (i > 0) {
      const double expected = p.spacing / (0.5 * (v0 + p.speeds[i]));
      r.timing = std::max(r.timing, std::abs(p.times[i] - p.times[prev] - expected));
    }
  }
  return r;
}

RacelineProfile build_raceline(const Track& track, const AccelEnvelope& envelope, const RacelineOptions& options) {
  const MinCurvatureResult path = min_curvature_path(track, options.margin, options.qp_iterations);
  const std::vector<Vec2> resampled = resample_closed(path.path, options.spacing);
  return optimize_speed_profile(resampled, envelope, options.a_c_max);
}

double raceline_time_near(const RacelineProfile& profile, const Vec2& point) {
  const std::size_t n = profile.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  double best_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = profile.points[i];
    const Vec2 ab = profile.points[(i + 1) % n] - a;
    const double t = std::clamp((point - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const double d2 = (a + t * ab - point).squaredNorm();
    if (d2 < best) {
      best = d2;
      best_i = i;
      best_t = t;
    }
  }
  return profile.times[best_i] + best_t * profile.segment_time(best_i);
}

namespace {

struct SegmentLookup {
  std::size_t i;
  std::size_t j;
  double tau;
};

SegmentLookup lookup_time(const RacelineProfile& profile, double t) {
  const double lap = profile.lap_time();
  t = std::fmod(t, lap);
  if (t < 0.0) t += lap;
  const auto it = std::upper_bound(profile.times.begin(), profile.times.end(), t);
  const std::size_t i = static_cast<std::size_t>(std::distance(profile.times.begin(), it)) - 1;
  const std::size_t j = (i + 1) % profile.size();
  return {i, j, std::clamp(t - profile.times[i], 0.0, profile.segment_time(i))};
}

Vec2 point_tangent(const RacelineProfile& profile, std::size_t i) {
  const std::size_t n = profile.size();
  return (profile.points[(i + 1) % n] - profile.points[(i + n - 1) % n]).normalized();
}

}  // namespace

RacelineState raceline_state_at_time(const RacelineProfile& profile, double t) {
  const auto [i, j, tau] = lookup_time(profile, t);
  const double vi = profile.speeds[i];
  const double vj = profile.speeds[j];
  const double dt = profile.segment_time(i);
  const double along = (profile.points[j] - profile.points[i]).norm();
  const double accel = (vj - vi) / dt;
  const double f = std::clamp((vi * tau + 0.5 * accel * tau * tau) / along, 0.0, 1.0);
  const double v = vi + accel * tau;
  const Vec2 tangent = ((1.0 - f) * point_tangent(profile, i) + f * point_tangent(profile, j)).normalized();
  const double kappa = (1.0 - f) * profile.curvatures[i] + f * profile.curvatures[j];
  RacelineState st;
  st.position = profile.points[i] + f * (profile.points[j] - profile.points[i]);
  st.velocity = v * tangent;
  st.acceleration = accel * tangent + (v * v * kappa) * left_normal(tangent);
  return st;
}

Vec2 raceline_position_at_time(const RacelineProfile& profile, double t) {
  return raceline_state_at_time(profile, t).position;
}

BezierCurve raceline_segment(const RacelineProfile& profile, const Vec2& start_position, double horizon, int order,
                             int fit_samples) {
  if (!(horizon > 0.0)) throw DomainError("segment horizon must be positive");
  fit_samples = std::max(fit_samples, order + 1);
  const double t0 = raceline_time_near(profile, start_position);
  const auto m = static_cast<std::size_t>(fit_samples);
  std::vector<Vec2> pts(m), vel(m), acc(m);
  std::vector<double> params(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double s = j + 1 == m ? 1.0 : static_cast<double>(j) / static_cast<double>(m - 1);
    params[j] = s;
    const RacelineState st = raceline_state_at_time(profile, t0 + s * horizon);
    pts[j] = st.position;
    vel[j] = st.velocity;
    acc[j] = st.acceleration;
  }
  return fit_bezier_kinematic(pts, vel, acc, params, order, horizon);
}

}  // namespace dbf
