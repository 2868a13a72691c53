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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dbf/envelope.hpp"
#include "dbf/filter.hpp"
#include "dbf/raceline.hpp"
#include "dbf/sim.hpp"

namespace dbf {

/// Everything a run or comparison needs. Serialized as one JSON document
/// with sections track, raceline, planner, planners, laps, seed, out_dir,
/// dbf, envelope, raceline_opt and sim; omitted keys keep their defaults and
/// unknown keys are rejected.
struct RunConfig {
  std::string track;
  std::string raceline;  // empty: optimize from the track
  std::string planner = "dbf";
  std::vector<std::string> planners = {"unfiltered", "dbf"};  // compare
  int laps = 5;
  std::uint64_t seed = 7;
  std::string out_dir = "out";
  DbfConfig dbf;  // dbf.seed mirrors seed
  std::vector<std::pair<double, double>> envelope_a_max;
  std::vector<std::pair<double, double>> envelope_a_min;
  RacelineOptions raceline_opt;
  SimConfig sim;
  std::filesystem::path base_dir;  // not serialized; relative paths resolve against it

  RunConfig();

  std::filesystem::path track_path() const;
  std::filesystem::path raceline_path() const;  // empty when not set
  std::filesystem::path out_path() const;
  AccelEnvelope envelope() const;

  /// Value checks. Throws ConfigError.
  void validate() const;
  /// validate() plus existence of the referenced files. Throws ConfigError.
  void validate_files() const;
};

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump_run_config(const RunConfig& cfg);
/// Throws ConfigError on syntax, type, range or unknown-key errors.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
/// Relative paths inside the file resolve against its directory.
RunConfig load_run_config(const std::filesystem::path& path);
/// FNV-1a of dump_run_config.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace dbf
