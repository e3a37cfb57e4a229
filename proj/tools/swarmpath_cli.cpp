#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "swarmpath/harness.hpp"

using namespace swarmpath;

namespace {

std::filesystem::path in_output_dir(const std::filesystem::path& p) {
  return p.is_absolute() ? p : default_output_dir() / p;
}

int cmd_run(const std::string& scenario, std::uint64_t seed, bool no_ta, const std::string& traj,
            const std::string& events, int robots, int threads) {
  const ScenarioConfig cfg = load_scenario(scenario);
  RunOptions opt;
  if (no_ta) opt.task_allocation = false;
  if (threads > 0) opt.threads = threads;
  TrajectoryLog log;
  if (!traj.empty()) opt.observer = [&log](const WorldState& w) { log.record(w); };
  const int n = robots > 0 ? robots : cfg.robot_count;
  const RunResult r = run_scenario(cfg, seed, n, opt);
  const RunRow& row = r.row;
  std::printf("environment      %s\n", row.environment.c_str());
  std::printf("seed             %" PRIu64 "\n", row.seed);
  std::printf("robots           %d\n", row.robot_count);
  std::printf("task allocation  %s\n", row.task_allocation ? "on" : "off");
  std::printf("status           %s\n", row.status.c_str());
  std::printf("ticks            %" PRId64 " (%.1f s)\n", row.ticks, row.seconds);
  if (r.allocation)
    std::printf("allocation       founder %d at tick %" PRId64 ", n=%d, path=%zu, rest=%zu\n",
                r.allocation->founder, r.allocation->tick, r.allocation->result.n_required,
                r.allocation->result.assigned_path.size(), r.allocation->result.assigned_rest.size());
  std::printf("resource saved   %.2f %%\n", row.resource_reduction);
  if (row.status == "PathFormed") {
    std::printf("chain            %zu anchors, valid=%s\n",
                r.outcome.chain ? r.outcome.chain->anchors.size() : 0,
                row.chain_valid ? "yes" : "no");
    std::printf("length raw       %.4f m\n", row.raw_length);
    std::printf("length optimized %.4f m\n", row.optimized_length);
  }
  std::printf("length A*        %.4f m\n", row.astar_length);
  if (!row.note.empty()) std::printf("note             %s\n", row.note.c_str());
  std::printf("trace_hash       %016" PRIx64 "\n", row.trace_hash);

  if (!traj.empty()) {
    const OccupancyGrid grid = rasterize(cfg.arena, cfg.grid_resolution);
    const auto path = in_output_dir(traj);
    export_trajectories(path, log, r.outcome.chain, r.astar, &grid);
    std::printf("trajectories     %s\n", path.string().c_str());
  }
  if (!events.empty()) {
    // Replays the run to capture the full log.
    SimParams p = cfg.sim;
    if (no_ta) p.controller.task_allocation_enabled = false;
    if (threads > 0) p.threads = threads;
    WorldState w = make_world(cfg.arena, n, seed, p);
    run_until(w, p, cfg.max_ticks);
    const auto path = in_output_dir(events);
    std::ofstream out(path);
    write_event_log(out, w.event_log);
    out << "trace_hash " << std::hex << trace_hash(w.event_log) << '\n';
    std::printf("events           %s\n", path.string().c_str());
  }
  return row.status == "Fault" ? 2 : 0;
}

void print_aggregate(const Aggregate& a) {
  std::printf("runs %d, path formed %d (%.1f %%)\n", a.runs, a.path_formed, 100.0 * a.success_rate);
  std::printf("mean resource reduction %.2f %%\n", a.mean_resource_reduction);
  std::printf("optimized <= raw %.1f %%, < raw %.1f %%, < A* %.1f %%\n",
              100.0 * a.fraction_not_longer_than_raw, 100.0 * a.fraction_shorter_than_raw,
              100.0 * a.fraction_shorter_than_astar);
  std::printf("mean time to path %.1f s\n", a.mean_seconds);
}

int cmd_batch(const std::string& suite_dir, int seeds, const std::string& out, bool no_ta) {
  const auto suite = load_suite(suite_dir);
  RunOptions opt;
  if (no_ta) opt.task_allocation = false;
  MetricsReport report;
  for (const ScenarioConfig& c : suite) {
    for (int k = 0; k < seeds; ++k) {
      RunRow row = run_scenario(c, static_cast<std::uint64_t>(k + 1),
                                c.robots_for_run(static_cast<std::size_t>(k)), opt)
                       .row;
      std::fprintf(stderr, "%-16s seed %-3d robots %-4d %-10s %7" PRId64 " ticks\n",
                   row.environment.c_str(), k + 1, row.robot_count, row.status.c_str(), row.ticks);
      report.rows.push_back(std::move(row));
    }
  }
  report.aggregate = aggregate_rows(report.rows);
  const auto path = in_output_dir(out);
  write_report(path, report);
  print_aggregate(report.aggregate);
  std::printf("report %s\n", path.string().c_str());
  return 0;
}

int cmd_compare(const std::string& report_path) {
  const auto rows = read_report(in_output_dir(report_path));
  std::printf("%-16s %5s %-10s %9s %9s %9s %9s %9s %7s\n", "environment", "seed", "status", "A*",
              "raw", "optimized", "opt/A*", "opt/raw", "saved%");
  std::map<std::string, std::vector<RunRow>> by_env;
  for (const RunRow& r : rows) {
    by_env[r.environment].push_back(r);
    if (r.status != "PathFormed") {
      std::printf("%-16s %5" PRIu64 " %-10s %9.3f\n", r.environment.c_str(), r.seed,
                  r.status.c_str(), r.astar_length);
      continue;
    }
    const PathComparison c = compare_lengths(r.raw_length, r.optimized_length, r.astar_length);
    std::printf("%-16s %5" PRIu64 " %-10s %9.3f %9.3f %9.3f %9.3f %9.3f %7.1f%s\n",
                r.environment.c_str(), r.seed, r.status.c_str(), c.astar_length, c.raw_length,
                c.optimized_length, c.optimized_over_astar, c.optimized_over_raw,
                r.resource_reduction, c.anomaly ? "  ANOMALY" : "");
  }
  std::printf("\n");
  for (const auto& [env, env_rows] : by_env) {
    const Aggregate a = aggregate_rows(env_rows);
    std::printf("%-16s success %3.0f %%  saved %5.1f %%  time %8.1f s\n", env.c_str(),
                100.0 * a.success_rate, a.mean_resource_reduction, a.mean_seconds);
  }
  std::printf("\n");
  print_aggregate(aggregate_rows(rows));
  return 0;
}

int cmd_astar(const std::string& arena_path, double resolution) {
  const ArenaSpec arena = load_arena(arena_path);
  const OccupancyGrid g = rasterize(arena, resolution);
  const Cell s = g.cell_of(arena.nest.center);
  const Cell t = g.cell_of(arena.goal.center);
  try {
    const GridPath p = astar(g, s, t);
    std::printf("grid %dx%d at %.3f m, %zu cells on path\n", g.width, g.height, resolution,
                p.cells.size());
    std::printf("A* length %.6f m\n", p.length);
    std::printf("dijkstra  %.6f m\n", dijkstra_oracle(g, s, t));
  } catch (const NoPathError&) {
    std::printf("no path\n");
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgoal path formation for robot swarms"};
  app.require_subcommand(1);

  std::string scenario, traj, events;
  std::uint64_t seed = 1;
  bool no_ta = false;
  int robots = 0, threads = 0;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Seed");
  run->add_flag("--no-task-allocation", no_ta, "Disable task allocation");
  run->add_option("--export-traj", traj, "Trajectory CSV");
  run->add_option("--export-events", events, "Event log");
  run->add_option("--robots", robots, "Override robot count");
  run->add_option("--threads", threads, "OpenMP threads");

  std::string suite, out = "report.csv";
  int seeds = 5;
  bool batch_no_ta = false;
  auto* batch = app.add_subcommand("batch", "Run every scenario of a suite over seeds 1..K");
  batch->add_option("--suite", suite, "Suite directory")->required()->check(CLI::ExistingDirectory);
  batch->add_option("--seeds", seeds, "Seeds per scenario")->check(CLI::PositiveNumber);
  batch->add_option("--out", out, "Report CSV (JSON sidecar written alongside)");
  batch->add_flag("--no-task-allocation", batch_no_ta, "Disable task allocation");

  std::string report;
  auto* compare = app.add_subcommand("compare", "Path comparison table from a report");
  compare->add_option("--report", report, "Report CSV")->required();

  std::string arena;
  double resolution = 0.05;
  auto* astar_cmd = app.add_subcommand("astar", "A* baseline on an arena");
  astar_cmd->add_option("--arena", arena, "Arena JSON")->required()->check(CLI::ExistingFile);
  astar_cmd->add_option("--resolution", resolution, "Cell size in meters");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(scenario, seed, no_ta, traj, events, robots, threads);
    if (*batch) return cmd_batch(suite, seeds, out, batch_no_ta);
    if (*compare) return cmd_compare(report);
    if (*astar_cmd) return cmd_astar(arena, resolution);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
