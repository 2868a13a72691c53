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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dbf/bezier.hpp"
#include "dbf/geometry.hpp"

namespace dbf {

struct VehicleFootprint {
  double length = 5.0;
  double width = 2.0;
};

struct TrackProjection {
  double station_arclength;  // m along the centerline, in [0, total_length)
  double lateral_offset;     // m, left of the local tangent is positive
  std::size_t segment;       // index of the segment start station
  double segment_t;          // [0, 1] along that segment
  Vec2 closest;              // nearest centerline point
};

/// Closed centerline loop with per-station left/right half-widths; the
/// drivable region is the band between the two boundaries.
///
/// Immutable after construction; all queries are const and thread-safe.
class Track {
 public:
  static constexpr std::size_t kMinStations = 8;
  static constexpr double kMaxStationSpacing = 5.0;

  /// Validates the loop (station count, spacing in (0, 5] m including the
  /// closing segment, half-widths > min_half_width). Throws ValidationError.
  Track(std::vector<Vec2> centerline, std::vector<double> half_width_left,
        std::vector<double> half_width_right, double min_half_width = 0.0);

  std::size_t size() const { return centerline_.size(); }
  double total_length() const { return total_length_; }
  const Vec2& station(std::size_t i) const { return centerline_[i]; }
  double arclength(std::size_t i) const { return arclength_[i]; }
  double half_width_left(std::size_t i) const { return hw_left_[i]; }
  double half_width_right(std::size_t i) const { return hw_right_[i]; }
  std::span<const Vec2> centerline() const { return centerline_; }
  double min_half_width() const;
  double max_half_width() const;

  /// Unit tangent at a station (central difference of neighbours).
  Vec2 station_tangent(std::size_t i) const;
  Vec2 station_normal(std::size_t i) const { return left_normal(station_tangent(i)); }

  TrackProjection project(const Vec2& point) const;

  /// <= 0 inside the band: minus the distance to the nearer boundary.
  /// > 0 outside: distance past the violated boundary.
  double signed_distance(const Vec2& point) const;

  /// Centerline point and tangent at an arclength (wrapped).
  Vec2 point_at(double arclength) const;

 private:
  struct Candidate {
    std::size_t segment;
    double t;
    double dist2;
  };
  Candidate nearest_on_segment(std::size_t seg, const Vec2& p) const;
  Candidate brute_force_nearest(const Vec2& p) const;
  void build_grid();

  std::vector<Vec2> centerline_;
  std::vector<double> hw_left_;
  std::vector<double> hw_right_;
  std::vector<double> arclength_;
  std::vector<double> segment_length_;
  double total_length_ = 0.0;

  // Uniform grid of segment indices; a segment is registered in every cell
  // its bounding box, inflated by grid_reach_, overlaps.
  double cell_size_ = 8.0;
  double grid_reach_ = 0.0;
  Vec2 grid_origin_ = Vec2::Zero();
  int grid_nx_ = 0;
  int grid_ny_ = 0;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> cell_items_;
};

/// Number of footprint rectangle corners with positive signed distance.
int footprint_violation(const Track& track, const Pose2& pose, const VehicleFootprint& footprint);

std::array<Vec2, 4> footprint_corners(const Pose2& pose, const VehicleFootprint& footprint);

/// Max signed distance over `samples` uniform-s points of the curve.
double curve_max_signed_distance(const Track& track, const BezierCurve& curve, int samples);

}  // namespace dbf
