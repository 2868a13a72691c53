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

#include "dbf/track_gen.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "dbf/errors.hpp"

namespace dbf {

namespace {

// Turtle path built from straight and constant-curvature pieces with exact
// arc geometry per substep.
class PathBuilder {
 public:
  explicit PathBuilder(double spacing) : spacing_(spacing) { points_.push_back(pos_); }

  void straight(double length) { piece(length, 0.0); }
  void arc(double radius, double angle) {  // angle > 0 turns left
    piece(radius * std::abs(angle), angle > 0 ? 1.0 / radius : -1.0 / radius);
  }
  double length() const { return length_; }

  std::vector<Vec2> close_loop() {
    if ((points_.back() - points_.front()).norm() > 1e-6)
      throw ValidationError("generated path does not close");
    std::vector<Vec2> out(points_.begin(), points_.end() - 1);
    return out;
  }

 private:
  void piece(double length, double curvature) {
    if (!(length > 0.0)) throw ValidationError("track piece length must be positive");
    const int steps = static_cast<int>(std::ceil(length / spacing_ - 1e-9));
    const double ds = length / steps;
    for (int k = 0; k < steps; ++k) {
      if (curvature == 0.0) {
        pos_ += ds * Vec2(std::cos(heading_), std::sin(heading_));
      } else {
        const double dh = ds * curvature;
        const double r = 1.0 / curvature;
        pos_ += r * Vec2(std::sin(heading_ + dh) - std::sin(heading_), -std::cos(heading_ + dh) + std::cos(heading_));
        heading_ += dh;
      }
      points_.push_back(pos_);
    }
    length_ += length;
  }

  double spacing_;
  Vec2 pos_ = Vec2::Zero();
  double heading_ = 0.0;
  double length_ = 0.0;
  std::vector<Vec2> points_;
};

Track make_track(std::vector<Vec2> centerline, double width) {
  if (!(width > 0.0)) throw ValidationError("track width must be positive");
  const std::vector<double> hw(centerline.size(), 0.5 * width);
  return Track(std::move(centerline), hw, hw);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive");
}

}  // namespace

GeneratedTrack generate_circle(const CircleTrackParams& p) {
  check_positive(p.radius, "radius");
  check_positive(p.width, "width");
  check_positive(p.spacing, "spacing");
  if (p.width >= 2.0 * p.radius) throw ValidationError("circle width must be below its diameter");
  const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi * p.radius / p.spacing));
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  // Start at the bottom, heading +x, so circles share the other generators' orientation.
  for (int i = 0; i < n; ++i) {
    const double a = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * i / n;
    pts.emplace_back(p.radius * std::cos(a), p.radius * std::sin(a) + p.radius);
  }
  Track t = make_track(std::move(pts), p.width);
  const double len = t.total_length();
  return {std::move(t), 0.0, len};
}

GeneratedTrack generate_oval(const OvalTrackParams& p) {
  check_positive(p.straight, "straight");
  check_positive(p.radius, "radius");
  check_positive(p.spacing, "spacing");
  PathBuilder b(p.spacing);
  b.straight(p.straight);
  b.arc(p.radius, std::numbers::pi);
  b.straight(p.straight);
  b.arc(p.radius, std::numbers::pi);
  Track t = make_track(b.close_loop(), p.width);
  const double len = t.total_length();
  return {std::move(t), 0.0, len};
}

GeneratedTrack generate_chicane(const ChicaneTrackParams& p) {
  check_positive(p.straight, "straight");
  check_positive(p.hairpin_radius, "hairpin radius");
  check_positive(p.approach, "approach");
  check_positive(p.chicane_radius, "chicane radius");
  check_positive(p.chicane_angle_deg, "chicane angle");
  const double theta = p.chicane_angle_deg * std::numbers::pi / 180.0;
  if (theta >= std::numbers::pi / 2) throw ValidationError("chicane angle must be below 90 degrees");
  const double chicane_run = 4.0 * p.chicane_radius * std::sin(theta);
  const double exit = p.straight - p.approach - chicane_run;
  if (!(exit > 0.0)) throw ValidationError("approach plus chicane exceed the straight length");

  PathBuilder b(p.spacing);
  b.straight(p.approach);
  const double begin = b.length();
  b.arc(p.chicane_radius, theta);
  b.arc(p.chicane_radius, -2.0 * theta);
  b.arc(p.chicane_radius, theta);
  const double end = b.length();
  b.straight(exit);
  b.arc(p.hairpin_radius, std::numbers::pi);
  b.straight(p.straight);
  b.arc(p.hairpin_radius, std::numbers::pi);
  Track t = make_track(b.close_loop(), p.width);
  return {std::move(t), begin, end};
}

}  // namespace dbf
