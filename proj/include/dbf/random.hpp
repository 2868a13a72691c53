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
#include <random>

namespace dbf {

// SplitMix64 finalizer, used to turn (seed, index) pairs into well-mixed
// substream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Reproducible random stream: std::mt19937_64 (bit-exact across standard
/// libraries) with uniform and normal variates derived in portable code
/// rather than through the implementation-defined std distributions.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Independent stream for a worker or sample index.
  static RandomStream substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal, Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace dbf
