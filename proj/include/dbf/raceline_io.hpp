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
#include <filesystem>
#include <iosfwd>

#include "dbf/raceline.hpp"

namespace dbf {

struct RacelineFileMeta {
  double spacing = kDefaultStationSpacing;
  double a_c_max = kDefaultCentripetalLimit;
  std::uint64_t envelope_hash = 0;
  std::uint64_t config_hash = 0;  // written only when nonzero
};

/// CSV `x_m,y_m,kappa_1pm,v_mps,t_s` preceded by `# key=value` comments for
/// spacing, a_c_max and the envelope hash. Numbers use 17 significant digits.
void write_raceline(std::ostream& out, const RacelineProfile& profile, const RacelineFileMeta& meta);
void write_raceline(const std::filesystem::path& path, const RacelineProfile& profile, const RacelineFileMeta& meta);

RacelineProfile read_raceline(std::istream& in, RacelineFileMeta* meta = nullptr);
RacelineProfile read_raceline(const std::filesystem::path& path, RacelineFileMeta* meta = nullptr);

}  // namespace dbf
