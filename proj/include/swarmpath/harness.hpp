#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swarmpath/baseline.hpp"
#include "swarmpath/chain.hpp"
#include "swarmpath/sim.hpp"

namespace swarmpath {

struct ScenarioConfig {
  std::string name;  // environment id
  std::filesystem::path arena_path;
  ArenaSpec arena;
  int robot_count = 80;
  std::vector<int> robot_count_sweep;  // seed k of a batch uses entry k % size
  std::uint64_t seed = 1;
  SimParams sim;  // controller carries task_allocation_enabled and delta
  std::int64_t max_ticks = 60000;
  double grid_resolution = 0.05;

  int robots_for_run(std::size_t run_index) const;
};

/// Relative arena paths resolve against `base_dir`.
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Scenario files (*.json) of a suite directory, sorted by file name.
std::vector<ScenarioConfig> load_suite(const std::filesystem::path& dir);

struct ChainValidation {
  bool valid = true;
  std::vector<std::string> violations;
};

ChainValidation validate_chain(const SubgoalChain& chain, const ArenaSpec& arena,
                               double visibility_range = 1.00);

struct PathComparison {
  double raw_length = 0.0;
  double optimized_length = 0.0;
  double astar_length = 0.0;
  double optimized_over_astar = 0.0;
  double optimized_over_raw = 0.0;
  bool shorter_than_astar = false;
  bool shorter_than_raw = false;
  bool anomaly = false;  // optimized longer than raw
};

PathComparison compare_lengths(double raw, double optimized, double astar);
PathComparison compare_paths(const SubgoalChain& raw, const SubgoalChain& optimized,
                             const GridPath& astar);

struct RunRow {
  std::string environment;
  std::uint64_t seed = 0;
  int robot_count = 0;
  bool task_allocation = true;
  std::string status;
  std::int64_t ticks = 0;
  double seconds = 0.0;
  double raw_length = 0.0;
  double optimized_length = 0.0;
  double astar_length = 0.0;
  int assigned_path = 0;
  int robots_resting = 0;  // robot_count - assigned_path
  double resource_reduction = 0.0;
  bool chain_valid = false;
  bool optimization_monotone = true;
  std::uint64_t trace_hash = 0;
  std::string note;
};

struct Aggregate {
  int runs = 0;
  int path_formed = 0;
  double success_rate = 0.0;
  double mean_resource_reduction = 0.0;  // over successful runs
  double fraction_shorter_than_astar = 0.0;
  double fraction_not_longer_than_raw = 0.0;
  double fraction_shorter_than_raw = 0.0;
  double mean_seconds = 0.0;  // over successful runs
};

struct MetricsReport {
  std::vector<RunRow> rows;
  Aggregate aggregate;
};

Aggregate aggregate_rows(const std::vector<RunRow>& rows);

struct RunOptions {
  std::optional<bool> task_allocation;  // overrides the scenario
  std::optional<int> threads;
  std::optional<Kernel> kernel;
  std::optional<std::int64_t> max_ticks;
  TickObserver observer;
};

struct RunResult {
  RunRow row;
  SimOutcome outcome;
  std::optional<AllocationRecord> allocation;
  std::vector<OptimizationTrace> traces;
  std::optional<GridPath> astar;
  std::size_t events = 0;
};

/// Per-step errors strictly decrease, and each step starts no higher than the
/// previous one ended (within 1e-9 rad).
bool trace_monotone(const OptimizationTrace& t);

RunResult run_scenario(const ScenarioConfig& config, std::uint64_t seed, int robot_count,
                       const RunOptions& options = {});

/// One row per seed; robot counts follow the sweep.
MetricsReport run_experiment(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                             const RunOptions& options = {});

/// Seeds 1..k over every scenario of the suite, rows ordered by (environment, seed).
MetricsReport run_suite(const std::vector<ScenarioConfig>& suite, int seeds,
                        const RunOptions& options = {});

void write_report_csv(std::ostream& out, const MetricsReport& report);
std::string aggregate_json(const Aggregate& aggregate);
/// Writes `path` and a `.json` sidecar next to it.
void write_report(const std::filesystem::path& path, const MetricsReport& report);
std::vector<RunRow> read_report_csv(std::istream& in);
std::vector<RunRow> read_report(const std::filesystem::path& path);

/// Collects per-tick poses for export.
struct TrajectoryRow {
  std::int64_t tick = 0;
  std::int32_t robot_id = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  RobotState state = RobotState::Resting;
  SignalColor led = SignalColor::White;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
  void record(const WorldState& state);
};

struct TrajectoryFile {
  std::vector<TrajectoryRow> rows;
  std::vector<Vec2> chain;  // nest, anchors..., goal
  std::vector<Vec2> astar;  // cell centers
};

void export_trajectories(std::ostream& out, const TrajectoryLog& log,
                         const std::optional<SubgoalChain>& chain,
                         const std::optional<GridPath>& astar, const OccupancyGrid* grid);
void export_trajectories(const std::filesystem::path& path, const TrajectoryLog& log,
                         const std::optional<SubgoalChain>& chain,
                         const std::optional<GridPath>& astar, const OccupancyGrid* grid);
TrajectoryFile import_trajectories(std::istream& in);

/// Directory named by SWARMPATH_OUT_DIR, or the current directory.
std::filesystem::path default_output_dir();

}  // namespace swarmpath
