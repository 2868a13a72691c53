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

#include "dbf/track.hpp"

namespace dbf {

// Synthetic closed tracks, driven counter-clockwise with stations about
// `spacing` metres apart. Widths are full widths, split evenly left/right.

struct CircleTrackParams {
  double radius = 100.0;
  double width = 12.0;
  double spacing = 2.0;
};

struct OvalTrackParams {
  double straight = 300.0;
  double radius = 100.0;
  double width = 12.0;
  double spacing = 2.0;
};

/// Stadium loop whose bottom straight carries an S-shaped chicane
/// (left, right, left bends) entered after a long braking straight.
struct ChicaneTrackParams {
  double straight = 500.0;          // length of the plain top straight
  double hairpin_radius = 80.0;
  double approach = 350.0;          // bottom straight before the chicane
  double chicane_radius = 35.0;
  double chicane_angle_deg = 40.0;  // entry/exit bend; the middle bend is twice this
  double width = 12.0;
  double spacing = 2.0;
};

/// Generated track plus the centerline arclength window of the feature the
/// generator is named after (the whole loop for circle/oval).
struct GeneratedTrack {
  Track track;
  double feature_begin;
  double feature_end;
};

GeneratedTrack generate_circle(const CircleTrackParams& params);
GeneratedTrack generate_oval(const OvalTrackParams& params);
GeneratedTrack generate_chicane(const ChicaneTrackParams& params);

}  // namespace dbf
