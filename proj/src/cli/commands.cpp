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

#include "dbf/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dbf/errors.hpp"
#include "dbf/hash.hpp"
#include "dbf/raceline_io.hpp"
#include "dbf/track_gen.hpp"
#include "dbf/track_io.hpp"
#include "json.hpp"

namespace dbf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string config;
};

struct GenTrackArgs {
  std::string shape = "chicane";
  std::string out;
  CircleTrackParams circle;
  OvalTrackParams oval;
  ChicaneTrackParams chicane;
  std::optional<double> radius, width, straight, spacing;
};

struct OptimizeArgs {
  std::string track;
  std::string out;
};

struct RunArgs {
  std::string planner;
  std::optional<int> laps;
};

struct CompareArgs {
  std::vector<std::string> planners;
  std::optional<int> laps;
};

RunConfig effective_config(const GlobalFlags& g) {
  RunConfig cfg = g.config.empty() ? RunConfig() : load_run_config(g.config);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.dbf.seed = *g.seed;
  }
  if (!g.out_dir.empty()) {
    cfg.out_dir = fs::absolute(g.out_dir).string();
  }
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Track load_track_checked(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("track file not found: " + path.string());
  return load_track(path);
}

RacelineProfile obtain_raceline(const RunConfig& cfg, const Track& track, const AccelEnvelope& env, std::ostream& err) {
  if (cfg.raceline.empty()) return build_raceline(track, env, cfg.raceline_opt);
  RacelineFileMeta meta;
  RacelineProfile p = read_raceline(cfg.raceline_path(), &meta);
  if (meta.envelope_hash != env.hash())
    err << "warning: raceline was optimized with a different envelope (" << hex64(meta.envelope_hash) << ")\n";
  return p;
}

struct LapStats {
  int completed = 0;
  std::optional<double> mean_lap_time;
  std::optional<double> mean_speed;
  int boundary_failures = 0;
};

LapStats lap_stats(const EpisodeResult& r) {
  LapStats s;
  double t = 0.0, v = 0.0;
  for (const auto& lap : r.laps) {
    s.boundary_failures += lap.boundary_failures;
    if (!lap.completed || lap.spin_out) continue;
    ++s.completed;
    t += lap.lap_time;
    v += lap.average_speed;
  }
  if (s.completed > 0) {
    s.mean_lap_time = t / s.completed;
    s.mean_speed = v / s.completed;
  }
  return s;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json header_json(const RunConfig& cfg) {
  return {{"config_hash", hex64(config_hash(cfg))}, {"seed", cfg.seed}, {"track", cfg.track}, {"laps", cfg.laps}};
}

json dbf_summary_json(const DbfSummary& d) {
  return {{"plans", d.plans},
          {"mean_ess", d.mean_ess},
          {"mean_iterations", d.mean_iterations},
          {"max_posterior_delta_a_c", d.max_posterior_delta_a_c},
          {"max_posterior_delta_a_l", d.max_posterior_delta_a_l},
          {"max_posterior_d", d.max_posterior_d}};
}

json episode_json(const EpisodeResult& r, const RunConfig& cfg) {
  json j = header_json(cfg);
  j["planner"] = planner_name(r.planner);
  json laps = json::array();
  for (const auto& lap : r.laps) {
    laps.push_back({{"lap", lap.lap},
                    {"lap_time_s", lap.lap_time},
                    {"average_speed_mps", lap.average_speed},
                    {"distance_m", lap.distance},
                    {"boundary_failures", lap.boundary_failures},
                    {"spin_out", lap.spin_out},
                    {"completed", lap.completed},
                    {"max_a_c_mps2", lap.max_a_c},
                    {"min_a_l_mps2", lap.min_a_l},
                    {"max_a_l_mps2", lap.max_a_l}});
  }
  j["per_lap"] = laps;
  const LapStats s = lap_stats(r);
  j["summary"] = {{"completed_laps", s.completed},
                  {"mean_lap_time_s", opt_json(s.mean_lap_time)},
                  {"mean_speed_mps", opt_json(s.mean_speed)},
                  {"boundary_failures", s.boundary_failures},
                  {"spin_out", r.spin_out},
                  {"spin_time_s", r.spin_out ? json(r.spin_time) : json(nullptr)}};
  if (r.planner == PlannerKind::DbfFiltered) j["dbf"] = dbf_summary_json(r.dbf);
  return j;
}

void print_table_header(std::ostream& out) {
  out << std::left << std::setw(14) << "planner" << std::right << std::setw(8) << "laps" << std::setw(14)
      << "lap_time_s" << std::setw(14) << "speed_mps" << std::setw(10) << "bound_f" << std::setw(10) << "spin_out"
      << "\n";
}

void print_table_row(std::ostream& out, const EpisodeResult& r) {
  const LapStats s = lap_stats(r);
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << *v;
    return ss.str();
  };
  out << std::left << std::setw(14) << planner_name(r.planner) << std::right << std::setw(8) << s.completed
      << std::setw(14) << num(s.mean_lap_time) << std::setw(14) << num(s.mean_speed) << std::setw(10)
      << s.boundary_failures << std::setw(10) << (r.spin_out ? "yes" : "no") << "\n";
}

std::string trace_csv(const EpisodeResult& r, const RunConfig& cfg) {
  std::ostringstream ss;
  ss << "# config_hash=" << hex64(config_hash(cfg)) << "\n";
  ss << "# planner=" << planner_name(r.planner) << "\n";
  ss << "# seed=" << cfg.seed << "\n";
  write_trace_csv(ss, r.trace);
  return ss.str();
}

EpisodeResult run_one(const RunConfig& cfg, PlannerKind kind, const Track& track, const RacelineProfile& profile,
                      const AccelEnvelope& env) {
  return run_episode(kind, track, profile, env, cfg.dbf, cfg.sim, cfg.laps, cfg.seed);
}

int cmd_gen_track(const GlobalFlags& g, const GenTrackArgs& a, std::ostream& out) {
  const RunConfig cfg = effective_config(g);
  const SimConfig& sim = cfg.sim;
  GeneratedTrack gen = [&] {
    if (a.shape == "circle") {
      CircleTrackParams p = a.circle;
      if (a.radius) p.radius = *a.radius;
      if (a.width) p.width = *a.width;
      if (a.spacing) p.spacing = *a.spacing;
      if (!(p.width > sim.footprint.width)) throw ConfigError("width must exceed the vehicle width");
      return generate_circle(p);
    }
    if (a.shape == "oval") {
      OvalTrackParams p = a.oval;
      if (a.radius) p.radius = *a.radius;
      if (a.width) p.width = *a.width;
      if (a.straight) p.straight = *a.straight;
      if (a.spacing) p.spacing = *a.spacing;
      if (!(p.width > sim.footprint.width)) throw ConfigError("width must exceed the vehicle width");
      return generate_oval(p);
    }
    ChicaneTrackParams p = a.chicane;
    if (a.radius) p.hairpin_radius = *a.radius;
    if (a.width) p.width = *a.width;
    if (a.straight) p.straight = *a.straight;
    if (a.spacing) p.spacing = *a.spacing;
    if (!(p.width > sim.footprint.width)) throw ConfigError("width must exceed the vehicle width");
    return generate_chicane(p);
  }();
  const fs::path path = a.out.empty() ? cfg.out_path() / (a.shape + ".csv") : fs::path(a.out);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ostringstream comment;
  comment << std::setprecision(17) << "shape=" << a.shape << " feature_begin_m=" << gen.feature_begin
          << " feature_end_m=" << gen.feature_end;
  write_track(path, gen.track, comment.str());
  out << "wrote " << path.string() << " (" << gen.track.size() << " stations, " << std::fixed << std::setprecision(3)
      << gen.track.total_length() << " m)\n";
  return kExitOk;
}

int cmd_optimize_raceline(const GlobalFlags& g, const OptimizeArgs& a, std::ostream& out) {
  RunConfig cfg = effective_config(g);
  if (!a.track.empty()) {
    cfg.track = fs::absolute(a.track).string();
  }
  if (cfg.track.empty()) throw ConfigError("no track given (use --track or a config with 'track')");
  const Track track = load_track_checked(cfg.track_path());
  const AccelEnvelope env = cfg.envelope();
  const RacelineProfile profile = build_raceline(track, env, cfg.raceline_opt);
  const fs::path path = a.out.empty() ? cfg.out_path() / "raceline.csv" : fs::path(a.out);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  RacelineFileMeta meta;
  meta.spacing = profile.spacing;
  meta.a_c_max = cfg.raceline_opt.a_c_max;
  meta.envelope_hash = env.hash();
  meta.config_hash = config_hash(cfg);
  write_raceline(path, profile, meta);

  const auto [vmin, vmax] = std::minmax_element(profile.speeds.begin(), profile.speeds.end());
  json summary = header_json(cfg);
  summary.erase("laps");
  summary["raceline"] = path.filename().string();
  summary["stations"] = profile.size();
  summary["sum_squared_curvature"] = sum_squared_curvature(profile.curvatures);
  summary["min_speed_mps"] = *vmin;
  summary["max_speed_mps"] = *vmax;
  summary["lap_time_s"] = profile.lap_time();
  fs::path summary_path = path;
  summary_path.replace_extension(".summary.json");
  write_text(summary_path, summary.dump(2) + "\n");

  out << "wrote " << path.string() << "\n" << std::fixed << std::setprecision(6);
  out << "sum_squared_curvature " << sum_squared_curvature(profile.curvatures) << "\n";
  out << std::setprecision(3) << "min_speed_mps " << *vmin << "\nmax_speed_mps " << *vmax << "\nlap_time_s "
      << profile.lap_time() << "\n";
  return kExitOk;
}

int cmd_run(const GlobalFlags& g, const RunArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = effective_config(g);
  if (!a.planner.empty()) cfg.planner = a.planner;
  if (a.laps) cfg.laps = *a.laps;
  cfg.validate_files();
  const PlannerKind kind = parse_planner(cfg.planner);
  const Track track = load_track_checked(cfg.track_path());
  const AccelEnvelope env = cfg.envelope();
  const RacelineProfile profile = obtain_raceline(cfg, track, env, err);
  const EpisodeResult r = run_one(cfg, kind, track, profile, env);
  const fs::path dir = cfg.out_path();
  ensure_dir(dir);
  write_text(dir / ("metrics_" + cfg.planner + ".json"), episode_metrics_json(r, cfg));
  write_text(dir / ("trace_" + cfg.planner + ".csv"), trace_csv(r, cfg));
  out << "config_hash " << hex64(config_hash(cfg)) << "\n";
  print_table_header(out);
  print_table_row(out, r);
  return kExitOk;
}

int cmd_compare(const GlobalFlags& g, const CompareArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = effective_config(g);
  if (!a.planners.empty()) cfg.planners = a.planners;
  if (a.laps) cfg.laps = *a.laps;
  if (cfg.planners.size() < 2) throw ConfigError("compare needs at least two planners");
  cfg.validate_files();
  std::vector<PlannerKind> kinds;
  for (const auto& p : cfg.planners) kinds.push_back(parse_planner(p));
  const Track track = load_track_checked(cfg.track_path());
  const AccelEnvelope env = cfg.envelope();
  const RacelineProfile profile = obtain_raceline(cfg, track, env, err);
  const fs::path dir = cfg.out_path();
  ensure_dir(dir);

  json report = header_json(cfg);
  json rows = json::array();
  out << "config_hash " << hex64(config_hash(cfg)) << "\n";
  print_table_header(out);
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const EpisodeResult r = run_one(cfg, kinds[i], track, profile, env);
    write_text(dir / ("metrics_" + cfg.planners[i] + ".json"), episode_metrics_json(r, cfg));
    write_text(dir / ("trace_" + cfg.planners[i] + ".csv"), trace_csv(r, cfg));
    const LapStats s = lap_stats(r);
    json row = {{"planner", cfg.planners[i]},
                {"completed_laps", s.completed},
                {"mean_lap_time_s", opt_json(s.mean_lap_time)},
                {"mean_speed_mps", opt_json(s.mean_speed)},
                {"boundary_failures", s.boundary_failures},
                {"spin_out", r.spin_out}};
    if (r.planner == PlannerKind::DbfFiltered) row["dbf"] = dbf_summary_json(r.dbf);
    rows.push_back(row);
    print_table_row(out, r);
  }
  report["rows"] = rows;
  write_text(dir / "compare.json", report.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

std::string episode_metrics_json(const EpisodeResult& result, const RunConfig& cfg) {
  return episode_json(result, cfg).dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Racing trajectory filtering simulator", "dbf-sim"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out-dir", g.out_dir, "override the output directory");
  app.add_option("--config", g.config, "JSON run config");

  GenTrackArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-track", "write a synthetic track CSV");
  gen_cmd->add_option("--shape", gen.shape, "circle, oval or chicane")
      ->check(CLI::IsMember({"circle", "oval", "chicane"}));
  gen_cmd->add_option("--radius", gen.radius, "circle/oval radius or chicane hairpin radius, m");
  gen_cmd->add_option("--width", gen.width, "track width, m");
  gen_cmd->add_option("--straight", gen.straight, "straight length, m");
  gen_cmd->add_option("--spacing", gen.spacing, "station spacing, m");
  gen_cmd->add_option("--approach", gen.chicane.approach, "chicane: straight before the S-bend, m");
  gen_cmd->add_option("--chicane-radius", gen.chicane.chicane_radius, "chicane: bend radius, m");
  gen_cmd->add_option("--chicane-angle", gen.chicane.chicane_angle_deg, "chicane: entry bend angle, deg");
  gen_cmd->add_option("--out", gen.out, "output path (default <out-dir>/<shape>.csv)");

  OptimizeArgs opt;
  CLI::App* opt_cmd = app.add_subcommand("optimize-raceline", "compute the optimal raceline of a track");
  opt_cmd->add_option("--track", opt.track, "track CSV (default: config track)");
  opt_cmd->add_option("--out", opt.out, "output path (default <out-dir>/raceline.csv)");

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "drive one planner and write metrics and a trace");
  run_cmd->add_option("--planner", run.planner, "ground-truth, unfiltered, dbf or unstable");
  run_cmd->add_option("--laps", run.laps, "override the lap count");

  CompareArgs cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "drive several planners on the same seed and track");
  cmp_cmd->add_option("--planners", cmp.planners, "planner names")->delimiter(',');
  cmp_cmd->add_option("--laps", cmp.laps, "override the lap count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*gen_cmd) return cmd_gen_track(g, gen, out);
    if (*opt_cmd) return cmd_optimize_raceline(g, opt, out);
    if (*run_cmd) return cmd_run(g, run, out, err);
    if (*cmp_cmd) return cmd_compare(g, cmp, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace dbf
