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

#include "dbf/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "dbf/errors.hpp"
#include "dbf/hash.hpp"

namespace dbf {

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("piecewise-linear table is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second))
      throw ValidationError("piecewise-linear table has non-finite entries");
    if (i > 0 && !(points_[i].first > points_[i - 1].first))
      throw ValidationError("piecewise-linear breakpoints must be strictly increasing");
  }
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= points_.front().first) return points_.front().second;
  if (x >= points_.back().first) return points_.back().second;
  const auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const auto& p) { return v < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (x - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

AccelEnvelope::AccelEnvelope(PiecewiseLinear a_max, PiecewiseLinear a_min)
    : a_max_(std::move(a_max)), a_min_(std::move(a_min)) {
  const auto& up = a_max_.points();
  const auto& down = a_min_.points();
  if (up.size() < 2) throw ValidationError("a_max table needs at least two breakpoints");
  if (up.front().first != 0.0 || down.front().first != 0.0)
    throw ValidationError("envelope tables must start at 0 m/s");
  for (std::size_t i = 0; i < up.size(); ++i) {
    if (up[i].second < 0.0) throw ValidationError("a_max must be >= 0");
    if (i > 0 && up[i].second > up[i - 1].second) throw ValidationError("a_max must be nonincreasing in speed");
  }
  if (up.back().second != 0.0) throw ValidationError("a_max must reach 0 at the top speed");
  for (std::size_t i = 0; i < down.size(); ++i) {
    if (!(down[i].second < 0.0)) throw ValidationError("a_min must be negative");
    if (i > 0 && down[i].second > down[i - 1].second)
      throw ValidationError("a_min must be nonincreasing in speed");
  }
}

double AccelEnvelope::max_abs() const {
  double m = 0.0;
  for (const auto& p : a_max_.points()) m = std::max(m, std::abs(p.second));
  for (const auto& p : a_min_.points()) m = std::max(m, std::abs(p.second));
  return m;
}

std::uint64_t AccelEnvelope::hash() const {
  Fnv1a h;
  for (const auto* table : {&a_max_, &a_min_}) {
    h.update_u64(table->points().size());
    for (const auto& [x, y] : table->points()) {
      h.update_double(x);
      h.update_double(y);
    }
  }
  return h.value();
}

AccelEnvelope default_envelope() {
  return AccelEnvelope(PiecewiseLinear({{0.0, 16.0}, {30.0, 12.0}, {60.0, 6.0}, {90.0, 0.0}}),
                       PiecewiseLinear({{0.0, -28.0}, {40.0, -34.0}, {90.0, -40.0}}));
}

}  // namespace dbf
