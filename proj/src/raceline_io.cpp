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

#include "dbf/raceline_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/hash.hpp"

namespace dbf {

namespace {

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) throw ParseError("not a number: '" + s + "'", line);
  return v;
}

}  // namespace

void write_raceline(std::ostream& out, const RacelineProfile& p, const RacelineFileMeta& meta) {
  out << std::setprecision(17);
  out << "# dr_m=" << meta.spacing << "\n";
  out << "# a_c_max_mps2=" << meta.a_c_max << "\n";
  out << "# envelope_hash=" << hex64(meta.envelope_hash) << "\n";
  if (meta.config_hash != 0) out << "# config_hash=" << hex64(meta.config_hash) << "\n";
  out << "x_m,y_m,kappa_1pm,v_mps,t_s\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << p.points[i].x() << ',' << p.points[i].y() << ',' << p.curvatures[i] << ',' << p.speeds[i] << ','
        << p.times[i] << '\n';
  }
}

void write_raceline(const std::filesystem::path& path, const RacelineProfile& p, const RacelineFileMeta& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_raceline(out, p, meta);
}

RacelineProfile read_raceline(std::istream& in, RacelineFileMeta* meta_out) {
  RacelineProfile p;
  RacelineFileMeta meta;
  std::string line;
  std::size_t no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "dr_m") meta.spacing = to_double(value, no);
      else if (key == "a_c_max_mps2") meta.a_c_max = to_double(value, no);
      else if (key == "envelope_hash") meta.envelope_hash = std::stoull(value, nullptr, 16);
      else if (key == "config_hash") meta.config_hash = std::stoull(value, nullptr, 16);
      continue;
    }
    if (!header) {
      if (line != "x_m,y_m,kappa_1pm,v_mps,t_s") throw ParseError("expected raceline header", no);
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw ParseError("expected 5 columns", no);
    p.points.emplace_back(to_double(cells[0], no), to_double(cells[1], no));
    p.curvatures.push_back(to_double(cells[2], no));
    p.speeds.push_back(to_double(cells[3], no));
    p.times.push_back(to_double(cells[4], no));
    if (!(p.speeds.back() > 0.0)) throw ParseError("raceline speed must be positive", no);
    if (p.times.size() > 1 && !(p.times.back() > p.times[p.times.size() - 2]))
      throw ParseError("raceline times must increase", no);
  }
  if (!header) throw ParseError("missing raceline header", 0);
  if (p.size() < 3) throw ParseError("raceline needs at least 3 points", 0);
  p.spacing = meta.spacing;
  p.closed = true;
  if (meta_out) *meta_out = meta;
  return p;
}

RacelineProfile read_raceline(const std::filesystem::path& path, RacelineFileMeta* meta) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open raceline file " + path.string(), 0);
  return read_raceline(in, meta);
}

}  // namespace dbf
