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

#include "dbf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dbf/errors.hpp"
#include "dbf/hash.hpp"
#include "json.hpp"

namespace dbf {

namespace {

using nlohmann::json;
using Table = std::vector<std::pair<double, double>>;

json table_to_json(const Table& t) {
  json arr = json::array();
  for (const auto& [x, y] : t) arr.push_back({x, y});
  return arr;
}

/// Reads keys from one JSON object, then rejects any it did not consume.
class Section {
 public:
  Section(const json& obj, std::string name) : obj_(obj), name_(std::move(name)) {
    if (!obj_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("'" + name_ + "." + key + "' has the wrong type");
    }
  }

  void get_table(const char* key, Table& out) {
    used_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    Table t;
    if (!it->is_array()) throw ConfigError("'" + name_ + "." + key + "' must be an array of [speed, accel] pairs");
    for (const auto& row : *it) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
        throw ConfigError("'" + name_ + "." + key + "' must be an array of [speed, accel] pairs");
      t.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    out = std::move(t);
  }

  const json* child(const char* key) {
    used_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items())
      if (!used_.count(k)) throw ConfigError("unknown key '" + (name_.empty() ? k : name_ + "." + k) + "'");
  }

 private:
  const json& obj_;
  std::string name_;
  std::set<std::string> used_;
};

json to_json(const RunConfig& c) {
  const DbfConfig& d = c.dbf;
  const SimConfig& s = c.sim;
  json j;
  j["track"] = c.track;
  j["raceline"] = c.raceline;
  j["planner"] = c.planner;
  j["planners"] = c.planners;
  j["laps"] = c.laps;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["dbf"] = {{"beta1", d.beta1},
              {"beta2", d.beta2},
              {"beta3", d.beta3},
              {"d_min", d.d_min},
              {"n_samples", d.n_samples},
              {"n_iterations", d.n_iterations},
              {"curve_samples", d.curve_samples},
              {"a_c_max", d.a_c_max},
              {"speed_scale", d.speed_scale},
              {"prior_variance", d.prior_variance},
              {"tolerance", d.tolerance},
              {"workers", d.workers},
              {"pinned_points", d.pinned_points}};
  j["envelope"] = {{"a_max", table_to_json(c.envelope_a_max)}, {"a_min", table_to_json(c.envelope_a_min)}};
  j["raceline_opt"] = {{"margin", c.raceline_opt.margin},
                       {"qp_iterations", c.raceline_opt.qp_iterations},
                       {"spacing", c.raceline_opt.spacing},
                       {"a_c_max", c.raceline_opt.a_c_max}};
  j["sim"] = {{"dt", s.dt},
              {"replan_period", s.replan_period},
              {"k_v", s.k_v},
              {"speed_lookahead", s.speed_lookahead},
              {"accel_feedforward", s.accel_feedforward},
              {"grip_governor", s.grip_governor},
              {"anchor_at_vehicle", s.anchor_at_vehicle},
              {"anchor_velocity", s.anchor_velocity},
              {"anchor_acceleration", s.anchor_acceleration},
              {"lookahead_gain", s.lookahead_gain},
              {"lookahead_min", s.lookahead_min},
              {"grip_limit", s.grip_limit},
              {"spin_factor", s.spin_factor},
              {"spin_duration", s.spin_duration},
              {"plan_samples", s.plan_samples},
              {"prior_noise", s.prior_noise},
              {"prior_horizon", s.prior_horizon},
              {"prior_order", s.prior_order},
              {"unstable_scale", s.unstable_scale},
              {"timeout_factor", s.timeout_factor},
              {"footprint_length", s.footprint.length},
              {"footprint_width", s.footprint.width}};
  return j;
}

RunConfig from_json(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  Section top(j, "");
  top.get("track", c.track);
  top.get("raceline", c.raceline);
  top.get("planner", c.planner);
  top.get("planners", c.planners);
  top.get("laps", c.laps);
  top.get("seed", c.seed);
  top.get("out_dir", c.out_dir);
  if (const json* o = top.child("dbf")) {
    Section d(*o, "dbf");
    d.get("beta1", c.dbf.beta1);
    d.get("beta2", c.dbf.beta2);
    d.get("beta3", c.dbf.beta3);
    d.get("d_min", c.dbf.d_min);
    d.get("n_samples", c.dbf.n_samples);
    d.get("n_iterations", c.dbf.n_iterations);
    d.get("curve_samples", c.dbf.curve_samples);
    d.get("a_c_max", c.dbf.a_c_max);
    d.get("speed_scale", c.dbf.speed_scale);
    d.get("prior_variance", c.dbf.prior_variance);
    d.get("tolerance", c.dbf.tolerance);
    d.get("workers", c.dbf.workers);
    d.get("pinned_points", c.dbf.pinned_points);
    d.finish();
  }
  if (const json* o = top.child("envelope")) {
    Section e(*o, "envelope");
    e.get_table("a_max", c.envelope_a_max);
    e.get_table("a_min", c.envelope_a_min);
    e.finish();
  }
  if (const json* o = top.child("raceline_opt")) {
    Section r(*o, "raceline_opt");
    r.get("margin", c.raceline_opt.margin);
    r.get("qp_iterations", c.raceline_opt.qp_iterations);
    r.get("spacing", c.raceline_opt.spacing);
    r.get("a_c_max", c.raceline_opt.a_c_max);
    r.finish();
  }
  if (const json* o = top.child("sim")) {
    Section s(*o, "sim");
    SimConfig& m = c.sim;
    s.get("dt", m.dt);
    s.get("replan_period", m.replan_period);
    s.get("k_v", m.k_v);
    s.get("speed_lookahead", m.speed_lookahead);
    s.get("accel_feedforward", m.accel_feedforward);
    s.get("grip_governor", m.grip_governor);
    s.get("anchor_at_vehicle", m.anchor_at_vehicle);
    s.get("anchor_velocity", m.anchor_velocity);
    s.get("anchor_acceleration", m.anchor_acceleration);
    s.get("lookahead_gain", m.lookahead_gain);
    s.get("lookahead_min", m.lookahead_min);
    s.get("grip_limit", m.grip_limit);
    s.get("spin_factor", m.spin_factor);
    s.get("spin_duration", m.spin_duration);
    s.get("plan_samples", m.plan_samples);
    s.get("prior_noise", m.prior_noise);
    s.get("prior_horizon", m.prior_horizon);
    s.get("prior_order", m.prior_order);
    s.get("unstable_scale", m.unstable_scale);
    s.get("timeout_factor", m.timeout_factor);
    s.get("footprint_length", m.footprint.length);
    s.get("footprint_width", m.footprint.width);
    s.finish();
  }
  top.finish();
  c.dbf.seed = c.seed;
  c.validate();
  return c;
}

}  // namespace

RunConfig::RunConfig() {
  const AccelEnvelope env = default_envelope();
  envelope_a_max = env.a_max_table().points();
  envelope_a_min = env.a_min_table().points();
  dbf.seed = seed;
}

std::filesystem::path RunConfig::track_path() const {
  const std::filesystem::path p(track);
  return p.is_absolute() || p.empty() ? p : base_dir / p;
}

std::filesystem::path RunConfig::raceline_path() const {
  const std::filesystem::path p(raceline);
  return p.is_absolute() || p.empty() ? p : base_dir / p;
}

std::filesystem::path RunConfig::out_path() const {
  const std::filesystem::path p(out_dir);
  return p.is_absolute() ? p : base_dir / p;
}

AccelEnvelope RunConfig::envelope() const {
  try {
    return AccelEnvelope(PiecewiseLinear(envelope_a_max), PiecewiseLinear(envelope_a_min));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("envelope: ") + e.what());
  }
}

void RunConfig::validate() const {
  auto check_planner = [](const std::string& name) {
    if (name != "ground-truth" && name != "unfiltered" && name != "dbf" && name != "unstable")
      throw ConfigError("unknown planner '" + name + "' (expected ground-truth, unfiltered, dbf or unstable)");
  };
  check_planner(planner);
  for (const auto& p : planners) check_planner(p);
  if (laps < 1) throw ConfigError("laps must be >= 1");
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
  if (!(raceline_opt.margin >= 0.0)) throw ConfigError("raceline_opt.margin must be >= 0");
  if (raceline_opt.qp_iterations < 1) throw ConfigError("raceline_opt.qp_iterations must be >= 1");
  if (!(raceline_opt.spacing > 0.0)) throw ConfigError("raceline_opt.spacing must be > 0");
  if (!(raceline_opt.a_c_max > 0.0)) throw ConfigError("raceline_opt.a_c_max must be > 0");
  try {
    dbf.validate();
    sim.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  (void)envelope();
}

void RunConfig::validate_files() const {
  validate();
  if (track.empty()) throw ConfigError("track is not set");
  if (!std::filesystem::is_regular_file(track_path()))
    throw ConfigError("track file not found: " + track_path().string());
  if (!raceline.empty() && !std::filesystem::is_regular_file(raceline_path()))
    throw ConfigError("raceline file not found: " + raceline_path().string());
}

std::string dump_run_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j, base_dir);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a(dump_run_config(cfg)); }

}  // namespace dbf
