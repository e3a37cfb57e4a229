#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmpath/agent.hpp"
#include "swarmpath/chain.hpp"
#include "swarmpath/comms.hpp"
#include "swarmpath/world.hpp"

namespace swarmpath {

inline constexpr double kBodyRadius = 0.085;
inline constexpr std::uint64_t kEmptyTraceHash = 0xcbf29ce484222325ull;

enum class Kernel : std::uint8_t { Serial, Parallel };

struct SimParams {
  ControllerParams controller;
  double body_radius = kBodyRadius;
  int deadlock_window = 5000;
  double deadlock_displacement = 0.001;
  int collision_iterations = 10;
  Kernel kernel = Kernel::Parallel;
  int threads = 0;  // 0: OpenMP default

  void validate() const;
};

struct LogEvent {
  std::int64_t tick = 0;
  std::int32_t robot = 0;
  AgentEvent event;
};

struct AllocationRecord {
  std::int64_t tick = 0;
  std::int32_t founder = kNoSource;
  AllocationResult result;
};

/// Alignment errors seen by one robot during one optimization pass.
struct OptimizationTrace {
  std::int32_t robot = 0;
  int pass = 1;
  std::vector<double> before;  // per accepted step
  std::vector<double> after;
};

struct WorldState {
  std::int64_t tick = 0;
  std::uint64_t seed = 0;
  ArenaSpec arena;
  std::vector<Robot> robots;  // robots[i].id == i
  std::vector<std::vector<ProtocolFrame>> inboxes;
  std::vector<LogEvent> event_log;

  std::int32_t founder = kNoSource;
  std::vector<AllocationRecord> allocations;
  std::vector<OptimizationTrace> traces;
  std::int32_t path_root = kNoSource;

  std::int64_t last_activity_tick = 0;
  std::vector<Vec2> activity_reference;
};

/// Robots at rest on a hex lattice around the nest, ids shuffled by the seed.
WorldState make_world(const ArenaSpec& arena, int robot_count, std::uint64_t seed,
                      const SimParams& params);

/// Proposed pose changes are separated in id order; `prior` holds the poses
/// from before the tick and is where unresolved movers are sent back to.
void resolve_collisions(std::vector<Robot>& robots, std::span<const Pose> prior,
                        const ArenaSpec& arena, double radius, int max_iterations = 10);

/// Advances the world by one tick.
void tick(WorldState& state, const SimParams& params);

enum class SimStatus : std::uint8_t { PathFormed, Timeout, Deadlock };
std::string_view to_string(SimStatus s);

struct SimOutcome {
  SimStatus status = SimStatus::Timeout;
  std::int64_t ticks_elapsed = 0;
  std::optional<SubgoalChain> chain;      // positions after optimization
  std::optional<SubgoalChain> raw_chain;  // positions at anchoring time
  int robots_active = 0;
  int robots_resting = 0;
};

using StopCondition = std::function<bool(const WorldState&)>;
using TickObserver = std::function<void(const WorldState&)>;

/// Steps until a path forms, the stop condition fires (reported as Timeout),
/// the deadlock window elapses or max_ticks is reached. Appends final poses to
/// the event log. `observer` sees the initial state and every ticked state.
SimOutcome run_until(WorldState& state, const SimParams& params, std::int64_t max_ticks,
                     const StopCondition& stop = {}, const TickObserver& observer = {});

/// Robots from the robot that completed the path back to the goal.
std::optional<SubgoalChain> extract_chain(const WorldState& state, bool raw);

/// FNV-1a over the event log. An empty log hashes to kEmptyTraceHash.
std::uint64_t trace_hash(std::span<const LogEvent> log);

/// Line-delimited `tick robot kind payload` records.
void write_event_log(std::ostream& out, std::span<const LogEvent> log);

}  // namespace swarmpath
