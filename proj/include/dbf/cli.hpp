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
#include <iosfwd>
#include <string>

#include "dbf/config.hpp"
#include "dbf/sim.hpp"

namespace dbf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands gen-track, optimize-raceline, run and compare; global flags
/// --seed, --out-dir and --config. Returns the process exit code: 0 on
/// success (spin-outs included), 2 on usage or config errors, 1 otherwise.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Metrics document of one episode. Holds no wall-clock values, so equal
/// configs give equal bytes.
std::string episode_metrics_json(const EpisodeResult& result, const RunConfig& cfg);

}  // namespace dbf
