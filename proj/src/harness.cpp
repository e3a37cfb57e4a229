#include "swarmpath/harness.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swarmpath {

using nlohmann::json;

int ScenarioConfig::robots_for_run(std::size_t run_index) const {
  if (robot_count_sweep.empty()) return robot_count;
  return robot_count_sweep[run_index % robot_count_sweep.size()];
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key + ": wrong type");
  }
}

void read_deg(const json& j, const char* key, double& out, const std::string& path) {
  double deg = rad_to_deg(out);
  read_opt(j, key, deg, path);
  out = deg_to_rad(deg);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario: expected an object");
  ScenarioConfig c;
  if (!j.contains("arena")) throw ConfigError("scenario.arena: missing");
  std::string arena;
  read_opt(j, "arena", arena, "scenario.");
  c.arena_path = base_dir / arena;
  try {
    c.arena = load_arena(c.arena_path);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("scenario.arena: ") + e.what());
  }
  c.name = c.arena.name;
  read_opt(j, "name", c.name, "scenario.");
  read_opt(j, "robot_count", c.robot_count, "scenario.");
  read_opt(j, "robot_count_sweep", c.robot_count_sweep, "scenario.");
  read_opt(j, "seed", c.seed, "scenario.");
  read_opt(j, "max_ticks", c.max_ticks, "scenario.");
  read_opt(j, "grid_resolution", c.grid_resolution, "scenario.");
  ControllerParams& p = c.sim.controller;
  read_opt(j, "task_allocation_enabled", p.task_allocation_enabled, "scenario.");
  read_opt(j, "delta", p.complexity_delta, "scenario.");
  if (j.contains("controller")) {
    const json& k = j.at("controller");
    const std::string path = "scenario.controller.";
    read_deg(k, "go_straight_angle_range_deg", p.go_straight_angle_range, path);
    read_opt(k, "delta", p.delta, path);
    read_opt(k, "minimum_resting_time", p.minimum_resting_time, path);
    read_opt(k, "initial_exploring_time", p.initial_exploring_time, path);
    read_opt(k, "minimum_search_for_place_in_nest", p.minimum_search_for_place_in_nest, path);
    read_deg(k, "hard_turn_angle_threshold_deg", p.wheels.hard_turn_threshold, path);
    read_deg(k, "soft_turn_angle_threshold_deg", p.wheels.soft_turn_threshold, path);
    read_deg(k, "no_turn_angle_threshold_deg", p.wheels.no_turn_threshold, path);
    read_opt(k, "max_speed", p.wheels.max_speed, path);
  }
  if (c.robot_count <= 0) throw ConfigError("scenario.robot_count: must be > 0");
  for (int n : c.robot_count_sweep)
    if (n <= 0) throw ConfigError("scenario.robot_count_sweep: entries must be > 0");
  if (c.max_ticks <= 0) throw ConfigError("scenario.max_ticks: must be > 0");
  if (!(c.grid_resolution > 0.0)) throw ConfigError("scenario.grid_resolution: must be > 0");
  try {
    c.sim.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("scenario.controller: ") + e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_scenario(ss.str(), path.parent_path());
  if (c.name.empty()) c.name = path.stem().string();
  return c;
}

std::vector<ScenarioConfig> load_suite(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no scenario files in " + dir.string());
  std::vector<ScenarioConfig> out;
  for (const auto& f : files) out.push_back(load_scenario(f));
  return out;
}

ChainValidation validate_chain(const SubgoalChain& chain, const ArenaSpec& arena,
                               double visibility_range) {
  ChainValidation v;
  const std::vector<Vec2> p = chain.points();
  char buf[160];
  for (std::size_t i = 1; i < p.size(); ++i) {
    const VisibilityResult los = line_of_sight(p[i - 1], p[i], arena, visibility_range);
    if (los.out_of_range) {
      std::snprintf(buf, sizeof buf, "gap: link %zu spans %.3f m", i - 1, los.range);
      v.violations.emplace_back(buf);
    } else if (los.occluded_by_obstacle) {
      std::snprintf(buf, sizeof buf, "occlusion: link %zu crosses an obstacle", i - 1);
      v.violations.emplace_back(buf);
    }
  }
  v.valid = v.violations.empty();
  return v;
}

PathComparison compare_lengths(double raw, double optimized, double astar) {
  PathComparison c;
  c.raw_length = raw;
  c.optimized_length = optimized;
  c.astar_length = astar;
  c.optimized_over_astar = astar > 0.0 ? optimized / astar : 0.0;
  c.optimized_over_raw = raw > 0.0 ? optimized / raw : 0.0;
  c.shorter_than_astar = optimized < astar;
  c.shorter_than_raw = optimized < raw;
  c.anomaly = raw < optimized;
  return c;
}

PathComparison compare_paths(const SubgoalChain& raw, const SubgoalChain& optimized,
                             const GridPath& astar) {
  return compare_lengths(chain_length(raw), chain_length(optimized), astar.length);
}

bool trace_monotone(const OptimizationTrace& t) {
  for (std::size_t k = 0; k < t.before.size(); ++k) {
    if (!(t.after[k] < t.before[k])) return false;
    if (k > 0 && t.before[k] > t.after[k - 1] + 1e-9) return false;
  }
  return true;
}

RunResult run_scenario(const ScenarioConfig& config, std::uint64_t seed, int robot_count,
                       const RunOptions& options) {
  SimParams params = config.sim;
  if (options.task_allocation) params.controller.task_allocation_enabled = *options.task_allocation;
  if (options.threads) params.threads = *options.threads;
  if (options.kernel) params.kernel = *options.kernel;
  const std::int64_t max_ticks = options.max_ticks.value_or(config.max_ticks);

  RunResult res;
  RunRow& row = res.row;
  row.environment = config.name;
  row.seed = seed;
  row.robot_count = robot_count;
  row.task_allocation = params.controller.task_allocation_enabled;
  row.assigned_path = robot_count;
  try {
    const OccupancyGrid grid = rasterize(config.arena, config.grid_resolution);
    res.astar = astar(grid, grid.cell_of(config.arena.nest.center),
                      grid.cell_of(config.arena.goal.center));
    row.astar_length = res.astar->length;
  } catch (const NoPathError&) {
    row.note = "astar: no path";
  }

  try {
    WorldState w = make_world(config.arena, robot_count, seed, params);
    res.outcome = run_until(w, params, max_ticks, {}, options.observer);
    res.events = w.event_log.size();
    row.trace_hash = trace_hash(w.event_log);
    res.traces = std::move(w.traces);
    if (!w.allocations.empty()) res.allocation = w.allocations.front();
  } catch (const std::exception& e) {
    row.status = "Fault";
    row.note = e.what();
    return res;
  }

  const SimOutcome& o = res.outcome;
  row.status = std::string(to_string(o.status));
  row.ticks = o.ticks_elapsed;
  row.seconds = static_cast<double>(o.ticks_elapsed) * params.controller.tick_seconds;
  if (row.task_allocation && res.allocation)
    row.assigned_path = static_cast<int>(res.allocation->result.assigned_path.size());
  row.robots_resting = robot_count - row.assigned_path;
  row.resource_reduction = 100.0 * (robot_count - row.assigned_path) / robot_count;
  for (const OptimizationTrace& t : res.traces)
    row.optimization_monotone = row.optimization_monotone && trace_monotone(t);
  if (o.status == SimStatus::PathFormed) {
    if (o.chain && o.raw_chain) {
      row.raw_length = chain_length(*o.raw_chain);
      row.optimized_length = chain_length(*o.chain);
      const ChainValidation v = validate_chain(*o.chain, config.arena,
                                               params.controller.visibility_range);
      row.chain_valid = v.valid;
      for (const std::string& s : v.violations) row.note += (row.note.empty() ? "" : "; ") + s;
    } else {
      row.note = "chain could not be traced";
    }
  }
  return res;
}

MetricsReport run_experiment(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                             const RunOptions& options) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  MetricsReport r;
  for (std::size_t k = 0; k < seeds.size(); ++k)
    r.rows.push_back(run_scenario(config, seeds[k], config.robots_for_run(k), options).row);
  r.aggregate = aggregate_rows(r.rows);
  return r;
}

MetricsReport run_suite(const std::vector<ScenarioConfig>& suite, int seeds,
                        const RunOptions& options) {
  if (seeds <= 0) throw ConfigError("at least one seed is required");
  MetricsReport r;
  for (const ScenarioConfig& c : suite)
    for (int k = 0; k < seeds; ++k)
      r.rows.push_back(run_scenario(c, static_cast<std::uint64_t>(k + 1),
                                    c.robots_for_run(static_cast<std::size_t>(k)), options)
                           .row);
  r.aggregate = aggregate_rows(r.rows);
  return r;
}

Aggregate aggregate_rows(const std::vector<RunRow>& rows) {
  Aggregate a;
  a.runs = static_cast<int>(rows.size());
  int astar_shorter = 0, not_longer = 0, shorter = 0;
  double reduction = 0.0, seconds = 0.0;
  for (const RunRow& r : rows) {
    if (r.status != "PathFormed") continue;
    ++a.path_formed;
    reduction += r.resource_reduction;
    seconds += r.seconds;
    if (r.optimized_length < r.astar_length) ++astar_shorter;
    if (r.optimized_length <= r.raw_length) ++not_longer;
    if (r.optimized_length < r.raw_length) ++shorter;
  }
  if (a.runs > 0) a.success_rate = static_cast<double>(a.path_formed) / a.runs;
  if (a.path_formed > 0) {
    const double n = a.path_formed;
    a.mean_resource_reduction = reduction / n;
    a.mean_seconds = seconds / n;
    a.fraction_shorter_than_astar = astar_shorter / n;
    a.fraction_not_longer_than_raw = not_longer / n;
    a.fraction_shorter_than_raw = shorter / n;
  }
  return a;
}

namespace {

constexpr const char* kReportHeader =
    "environment,seed,robot_count,task_allocation,status,ticks,seconds,raw_length,"
    "optimized_length,astar_length,assigned_path,robots_resting,resource_reduction,"
    "chain_valid,optimization_monotone,trace_hash,note";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_report_csv(std::ostream& out, const MetricsReport& report) {
  out << kReportHeader << '\n';
  char hash[24];
  for (const RunRow& r : report.rows) {
    std::snprintf(hash, sizeof hash, "%016" PRIx64, r.trace_hash);
    out << csv_escape(r.environment) << ',' << r.seed << ',' << r.robot_count << ','
        << (r.task_allocation ? 1 : 0) << ',' << r.status << ',' << r.ticks << ','
        << fmt(r.seconds) << ',' << fmt(r.raw_length) << ',' << fmt(r.optimized_length) << ','
        << fmt(r.astar_length) << ',' << r.assigned_path << ',' << r.robots_resting << ','
        << fmt(r.resource_reduction) << ',' << (r.chain_valid ? 1 : 0) << ','
        << (r.optimization_monotone ? 1 : 0) << ',' << hash << ',' << csv_escape(r.note) << '\n';
  }
}

std::string aggregate_json(const Aggregate& a) {
  json j = {
      {"runs", a.runs},
      {"path_formed", a.path_formed},
      {"success_rate", a.success_rate},
      {"mean_resource_reduction", a.mean_resource_reduction},
      {"fraction_shorter_than_astar", a.fraction_shorter_than_astar},
      {"fraction_not_longer_than_raw", a.fraction_not_longer_than_raw},
      {"fraction_shorter_than_raw", a.fraction_shorter_than_raw},
      {"mean_seconds", a.mean_seconds},
  };
  return j.dump(2);
}

void write_report(const std::filesystem::path& path, const MetricsReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot write " + path.string());
  write_report_csv(csv, report);
  std::filesystem::path side = path;
  side.replace_extension(".json");
  std::ofstream js(side);
  if (!js) throw std::runtime_error("cannot write " + side.string());
  js << aggregate_json(report.aggregate) << '\n';
}

std::vector<RunRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw ConfigError("report: unexpected header");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 17) throw ConfigError("report: row with " + std::to_string(f.size()) + " fields");
    RunRow r;
    r.environment = f[0];
    r.seed = std::stoull(f[1]);
    r.robot_count = std::stoi(f[2]);
    r.task_allocation = f[3] == "1";
    r.status = f[4];
    r.ticks = std::stoll(f[5]);
    r.seconds = std::stod(f[6]);
    r.raw_length = std::stod(f[7]);
    r.optimized_length = std::stod(f[8]);
    r.astar_length = std::stod(f[9]);
    r.assigned_path = std::stoi(f[10]);
    r.robots_resting = std::stoi(f[11]);
    r.resource_reduction = std::stod(f[12]);
    r.chain_valid = f[13] == "1";
    r.optimization_monotone = f[14] == "1";
    r.trace_hash = std::stoull(f[15], nullptr, 16);
    r.note = f[16];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RunRow> read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open report " + path.string());
  return read_report_csv(in);
}

void TrajectoryLog::record(const WorldState& state) {
  for (const Robot& r : state.robots)
    rows.push_back({state.tick, r.id, r.pose.position.x, r.pose.position.y, r.pose.heading,
                    r.state, r.led});
}

namespace {

constexpr const char* kTrajectoryHeader = "tick,robot_id,x,y,heading,state,led";

template <typename E, int N>
E parse_enum(const std::string& s) {
  for (int i = 0; i < N; ++i)
    if (to_string(static_cast<E>(i)) == s) return static_cast<E>(i);
  throw ConfigError("trajectory: unknown value " + s);
}

}  // namespace

void export_trajectories(std::ostream& out, const TrajectoryLog& log,
                         const std::optional<SubgoalChain>& chain,
                         const std::optional<GridPath>& astar, const OccupancyGrid* grid) {
  out << "# trajectory\n" << kTrajectoryHeader << '\n';
  for (const TrajectoryRow& r : log.rows)
    out << r.tick << ',' << r.robot_id << ',' << fmt(r.x) << ',' << fmt(r.y) << ','
        << fmt(r.heading) << ',' << to_string(r.state) << ',' << to_string(r.led) << '\n';
  out << "# chain\nindex,robot_id,x,y\n";
  if (chain) {
    const auto pts = chain->points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::int32_t id = i == 0 ? kNestSource : (i + 1 == pts.size() ? kGoalSource
                                                                       : chain->anchors[i - 1].robot_id);
      out << i << ',' << id << ',' << fmt(pts[i].x) << ',' << fmt(pts[i].y) << '\n';
    }
  }
  out << "# astar\nindex,x,y\n";
  if (astar && grid) {
    for (std::size_t i = 0; i < astar->cells.size(); ++i) {
      const Vec2 c = grid->center_of(astar->cells[i]);
      out << i << ',' << fmt(c.x) << ',' << fmt(c.y) << '\n';
    }
  }
}

void export_trajectories(const std::filesystem::path& path, const TrajectoryLog& log,
                         const std::optional<SubgoalChain>& chain,
                         const std::optional<GridPath>& astar, const OccupancyGrid* grid) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  export_trajectories(out, log, chain, astar, grid);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TrajectoryFile import_trajectories(std::istream& in) {
  TrajectoryFile f;
  std::string line;
  std::string section;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      section = line.substr(2);
      header = true;
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    const auto v = split_csv(line);
    if (section == "trajectory" && v.size() == 7) {
      f.rows.push_back({std::stoll(v[0]), std::stoi(v[1]), std::stod(v[2]), std::stod(v[3]),
                        std::stod(v[4]), parse_enum<RobotState, kRobotStateCount>(v[5]),
                        parse_enum<SignalColor, 11>(v[6])});
    } else if (section == "chain" && v.size() == 4) {
      f.chain.push_back({std::stod(v[2]), std::stod(v[3])});
    } else if (section == "astar" && v.size() == 3) {
      f.astar.push_back({std::stod(v[1]), std::stod(v[2])});
    } else {
      throw ConfigError("trajectory: malformed line in section " + section);
    }
  }
  return f;
}

std::filesystem::path default_output_dir() {
  if (const char* d = std::getenv("SWARMPATH_OUT_DIR"); d && *d) return d;
  return std::filesystem::current_path();
}

}  // namespace swarmpath
