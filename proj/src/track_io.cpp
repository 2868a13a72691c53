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

#include "dbf/track_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "dbf/errors.hpp"

namespace dbf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || cell.empty()) throw ParseError("not a number: '" + cell + "'", line);
  return v;
}

}  // namespace

Track parse_track(std::istream& in, double min_half_width) {
  std::vector<Vec2> centerline;
  std::vector<double> left, right;
  std::vector<std::size_t> row_line;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (!header_seen) {
      if (cells != std::vector<std::string>{"x_m", "y_m", "w_left_m", "w_right_m"})
        throw ParseError("expected header x_m,y_m,w_left_m,w_right_m", line_no);
      header_seen = true;
      continue;
    }
    if (cells.size() != 4) throw ParseError("expected 4 columns, got " + std::to_string(cells.size()), line_no);
    const double x = parse_number(cells[0], line_no);
    const double y = parse_number(cells[1], line_no);
    const double wl = parse_number(cells[2], line_no);
    const double wr = parse_number(cells[3], line_no);
    if (!(wl > min_half_width) || !(wr > min_half_width))
      throw ParseError("half-width must exceed " + std::to_string(min_half_width) + " m", line_no);
    centerline.emplace_back(x, y);
    left.push_back(wl);
    right.push_back(wr);
    row_line.push_back(line_no);
  }
  if (!header_seen) throw ParseError("missing header", 0);
  // Rows repeating the first station close the loop explicitly.
  if (centerline.size() > 1 && (centerline.back() - centerline.front()).norm() == 0.0) {
    centerline.pop_back();
    left.pop_back();
    right.pop_back();
    row_line.pop_back();
  }
  for (std::size_t i = 0; i + 1 < centerline.size(); ++i) {
    const double gap = (centerline[i + 1] - centerline[i]).norm();
    if (!(gap > 0.0)) throw ParseError("duplicate station", row_line[i + 1]);
    if (gap > Track::kMaxStationSpacing)
      throw ParseError("station spacing " + std::to_string(gap) + " m exceeds limit", row_line[i + 1]);
  }
  try {
    return Track(std::move(centerline), std::move(left), std::move(right), min_half_width);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("track: ") + e.what());
  }
}

Track load_track(const std::filesystem::path& path, double min_half_width) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open track file " + path.string(), 0);
  return parse_track(in, min_half_width);
}

void write_track(std::ostream& out, const Track& track, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "x_m,y_m,w_left_m,w_right_m\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < track.size(); ++i) {
    out << track.station(i).x() << ',' << track.station(i).y() << ',' << track.half_width_left(i) << ','
        << track.half_width_right(i) << '\n';
  }
}

void write_track(const std::filesystem::path& path, const Track& track, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_track(out, track, comment);
}

}  // namespace dbf
