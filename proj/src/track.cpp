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

#include "dbf/track.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dbf/errors.hpp"

namespace dbf {

Track::Track(std::vector<Vec2> centerline, std::vector<double> half_width_left,
             std::vector<double> half_width_right, double min_half_width)
    : centerline_(std::move(centerline)),
      hw_left_(std::move(half_width_left)),
      hw_right_(std::move(half_width_right)) {
  const std::size_t n = centerline_.size();
  if (n < kMinStations)
    throw ValidationError("track has " + std::to_string(n) + " stations, minimum is " +
                          std::to_string(kMinStations));
  if (hw_left_.size() != n || hw_right_.size() != n)
    throw ValidationError("half-width arrays do not match station count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!centerline_[i].allFinite()) throw ValidationError("station " + std::to_string(i) + " not finite");
    if (!(hw_left_[i] > min_half_width) || !(hw_right_[i] > min_half_width) || !std::isfinite(hw_left_[i]) ||
        !std::isfinite(hw_right_[i]))
      throw ValidationError("station " + std::to_string(i) + " half-width must exceed " +
                            std::to_string(min_half_width) + " m");
  }
  arclength_.resize(n);
  segment_length_.resize(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double len = (centerline_[(i + 1) % n] - centerline_[i]).norm();
    if (!(len > 0.0)) throw ValidationError("duplicate station " + std::to_string(i));
    if (len > kMaxStationSpacing)
      throw ValidationError("station spacing " + std::to_string(len) + " m after station " +
                            std::to_string(i) + (i + 1 == n ? " (loop not closed)" : "") +
                            " exceeds " + std::to_string(kMaxStationSpacing) + " m");
    arclength_[i] = s;
    segment_length_[i] = len;
    s += len;
  }
  total_length_ = s;
  build_grid();
}

double Track::min_half_width() const {
  return std::min(*std::min_element(hw_left_.begin(), hw_left_.end()),
                  *std::min_element(hw_right_.begin(), hw_right_.end()));
}

double Track::max_half_width() const {
  return std::max(*std::max_element(hw_left_.begin(), hw_left_.end()),
                  *std::max_element(hw_right_.begin(), hw_right_.end()));
}

Vec2 Track::station_tangent(std::size_t i) const {
  const std::size_t n = size();
  const Vec2 d = centerline_[(i + 1) % n] - centerline_[(i + n - 1) % n];
  return d.normalized();
}

void Track::build_grid() {
  grid_reach_ = max_half_width() + 4.0;
  Eigen::AlignedBox2d box;
  for (const auto& p : centerline_) box.extend(p);
  grid_origin_ = box.min() - Vec2::Constant(grid_reach_ + cell_size_);
  const Vec2 extent = box.max() + Vec2::Constant(grid_reach_ + cell_size_) - grid_origin_;
  grid_nx_ = static_cast<int>(std::ceil(extent.x() / cell_size_)) + 1;
  grid_ny_ = static_cast<int>(std::ceil(extent.y() / cell_size_)) + 1;

  std::vector<std::vector<std::size_t>> cells(static_cast<std::size_t>(grid_nx_) * grid_ny_);
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = centerline_[i];
    const Vec2& b = centerline_[(i + 1) % n];
    const Vec2 lo = a.cwiseMin(b) - Vec2::Constant(grid_reach_) - grid_origin_;
    const Vec2 hi = a.cwiseMax(b) + Vec2::Constant(grid_reach_) - grid_origin_;
    const int x0 = static_cast<int>(std::floor(lo.x() / cell_size_));
    const int x1 = static_cast<int>(std::floor(hi.x() / cell_size_));
    const int y0 = static_cast<int>(std::floor(lo.y() / cell_size_));
    const int y1 = static_cast<int>(std::floor(hi.y() / cell_size_));
    for (int x = x0; x <= x1; ++x)
      for (int y = y0; y <= y1; ++y) cells[static_cast<std::size_t>(y) * grid_nx_ + x].push_back(i);
  }
  cell_start_.assign(cells.size() + 1, 0);
  for (std::size_t c = 0; c < cells.size(); ++c) cell_start_[c + 1] = cell_start_[c] + cells[c].size();
  cell_items_.reserve(cell_start_.back());
  for (const auto& c : cells) cell_items_.insert(cell_items_.end(), c.begin(), c.end());
}

Track::Candidate Track::nearest_on_segment(std::size_t seg, const Vec2& p) const {
  const Vec2& a = centerline_[seg];
  const Vec2& b = centerline_[(seg + 1) % size()];
  const Vec2 ab = b - a;
  double t = (p - a).dot(ab) / ab.squaredNorm();
  t = std::clamp(t, 0.0, 1.0);
  return {seg, t, (a + t * ab - p).squaredNorm()};
}

Track::Candidate Track::brute_force_nearest(const Vec2& p) const {
  Candidate best{0, 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < size(); ++i) {
    const Candidate c = nearest_on_segment(i, p);
    if (c.dist2 < best.dist2) best = c;
  }
  return best;
}

TrackProjection Track::project(const Vec2& point) const {
  Candidate best{0, 0.0, std::numeric_limits<double>::infinity()};
  const Vec2 rel = point - grid_origin_;
  const int cx = static_cast<int>(std::floor(rel.x() / cell_size_));
  const int cy = static_cast<int>(std::floor(rel.y() / cell_size_));
  if (cx >= 0 && cy >= 0 && cx < grid_nx_ && cy < grid_ny_) {
    const std::size_t cell = static_cast<std::size_t>(cy) * grid_nx_ + cx;
    for (std::size_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
      const Candidate c = nearest_on_segment(cell_items_[k], point);
      if (c.dist2 < best.dist2 || (c.dist2 == best.dist2 && c.segment < best.segment)) best = c;
    }
  }
  // Every segment within grid_reach_ of the point is registered in its cell,
  // so a candidate that close is the global nearest.
  if (!(best.dist2 <= grid_reach_ * grid_reach_)) best = brute_force_nearest(point);

  const std::size_t i = best.segment;
  const std::size_t j = (i + 1) % size();
  const Vec2 dir = (centerline_[j] - centerline_[i]) / segment_length_[i];
  const Vec2 closest = centerline_[i] + best.t * (centerline_[j] - centerline_[i]);
  const double dist = std::sqrt(best.dist2);
  const double side = cross(dir, point - closest);
  TrackProjection out;
  out.segment = i;
  out.segment_t = best.t;
  out.closest = closest;
  out.lateral_offset = side >= 0.0 ? dist : -dist;
  out.station_arclength = arclength_[i] + best.t * segment_length_[i];
  if (out.station_arclength >= total_length_) out.station_arclength -= total_length_;
  return out;
}

double Track::signed_distance(const Vec2& point) const {
  const TrackProjection pr = project(point);
  const std::size_t i = pr.segment;
  const std::size_t j = (i + 1) % size();
  const double t = pr.segment_t;
  const double hw_l = (1.0 - t) * hw_left_[i] + t * hw_left_[j];
  const double hw_r = (1.0 - t) * hw_right_[i] + t * hw_right_[j];
  const double off = pr.lateral_offset;
  if (off > hw_l) return off - hw_l;
  if (off < -hw_r) return -hw_r - off;
  return -std::min(hw_l - off, off + hw_r);
}

Vec2 Track::point_at(double s) const {
  s = std::fmod(s, total_length_);
  if (s < 0.0) s += total_length_;
  const auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  const std::size_t i = static_cast<std::size_t>(std::distance(arclength_.begin(), it)) - 1;
  const double t = (s - arclength_[i]) / segment_length_[i];
  return centerline_[i] + t * (centerline_[(i + 1) % size()] - centerline_[i]);
}

std::array<Vec2, 4> footprint_corners(const Pose2& pose, const VehicleFootprint& fp) {
  const Vec2 fwd(std::cos(pose.heading), std::sin(pose.heading));
  const Vec2 left = left_normal(fwd);
  const Vec2 hl = 0.5 * fp.length * fwd;
  const Vec2 hw = 0.5 * fp.width * left;
  return {pose.position + hl + hw, pose.position + hl - hw, pose.position - hl - hw, pose.position - hl + hw};
}

int footprint_violation(const Track& track, const Pose2& pose, const VehicleFootprint& fp) {
  int out = 0;
  for (const Vec2& c : footprint_corners(pose, fp))
    if (track.signed_distance(c) > 0.0) ++out;
  return out;
}

double curve_max_signed_distance(const Track& track, const BezierCurve& curve, int samples) {
  if (samples < 8) throw DomainError("curve_max_signed_distance needs at least 8 samples");
  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double s = j == samples - 1 ? 1.0 : static_cast<double>(j) / (samples - 1);
    worst = std::max(worst, track.signed_distance(evaluate(curve, s)));
  }
  return worst;
}

}  // namespace dbf
