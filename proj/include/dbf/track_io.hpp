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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dbf/track.hpp"

namespace dbf {

/// Reads the canonical track CSV (`x_m,y_m,w_left_m,w_right_m`, `#` comments,
/// loop closed implicitly from the last row to the first).
///
/// Throws ParseError (with the offending line) for malformed rows and
/// ValidationError for geometric problems.
Track load_track(const std::filesystem::path& path, double min_half_width = 1.0);
Track parse_track(std::istream& in, double min_half_width = 1.0);

void write_track(const std::filesystem::path& path, const Track& track, const std::string& comment = {});
void write_track(std::ostream& out, const Track& track, const std::string& comment = {});

}  // namespace dbf
