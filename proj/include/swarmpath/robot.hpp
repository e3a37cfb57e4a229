#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "swarmpath/geometry.hpp"

namespace swarmpath {

/// The eight behavioral states of the controller.
enum class RobotState : std::uint8_t {
  Resting,
  Exploring,
  ReturnToNest,
  Subgoal,
  DecisionMaking,
  Recovery,
  HeuristicOpt1,
  HeuristicOpt2,
};

inline constexpr int kRobotStateCount = 8;

/// LED ring palette plus the two landmark colors seen by the camera.
enum class SignalColor : std::uint8_t {
  Black,           // exploring
  Cyan,            // return to nest
  Red,             // anchored subgoal
  Blue,            // first optimization / sub-nest
  RedYellow,       // second optimization
  FounderMagenta,  // goal founder (dashed)
  Magenta,         // recovery
  IntenseMagenta,  // decision making
  White,           // resting, or seeking a subgoal position
  NestBlue,
  GoalPink,
};

std::string_view to_string(RobotState s);
std::string_view to_string(SignalColor c);

/// Camera source ids for the two landmarks; robots use their non-negative id.
inline constexpr std::int32_t kNestSource = -1;
inline constexpr std::int32_t kGoalSource = -2;
inline constexpr std::int32_t kNoSource = -3;

struct Pose {
  Vec2 position;
  double heading = 0.0;
};

/// Message-protocol progress kept by a goal founder while it allocates tasks.
struct AllocationProgress {
  bool active = false;
  bool finished = false;
  int n_required = 0;
  int window_ticks = 0;
  std::uint16_t founder_exploring_ticks = 0;
  std::vector<std::int32_t> responders;  // arrival order
  std::vector<std::int32_t> accepted;
};

struct Robot {
  std::int32_t id = 0;
  Pose pose;
  RobotState state = RobotState::Resting;
  SignalColor led = SignalColor::White;
  bool goal_founder = false;

  int exploring_ticks = 0;        // current excursion
  int total_exploring_ticks = 0;  // summed over all excursions
  double explore_offset = 0.0;    // wandering offset from the away-from-nest heading
  int resting_ticks_remaining = 0;
  int exploration_budget = 0;

  // Subgoal bookkeeping. anchored_pos is the position at which the robot first
  // became static; optimization moves do not change it.
  bool anchored = false;
  Vec2 anchored_pos;
  std::int32_t target_id = kNoSource;      // goal-side neighbour
  std::int32_t nest_side_id = kNoSource;   // nest-side neighbour during alignment
  double target_last_range = 0.0;
  bool converged = false;
  int seek_ticks = 0;
  std::vector<std::int32_t> children;  // robots that announced anchoring on this one
  int nest_defer_ticks = 0;

  // Task allocation.
  bool task_known = false;      // received an assignment (or gave up waiting)
  bool allocated_rest = false;  // told to rest by the allocation round
  bool responded = false;
  std::int32_t founder_id = kNoSource;
  int decision_ticks = 0;
  int nest_dwell_ticks = 0;
  std::uint16_t found_at_exploring_ticks = 0;
  AllocationProgress allocation;

  // Homing progress. A robot that stops closing in on the nest follows walls
  // on a fixed side for a while.
  double home_best = 1.0e9;
  int home_stall_ticks = 0;
  int detour_ticks = 0;

  int handedness = 1;  // +1 / -1, sliding side when blocked head-on
  std::uint64_t rng_stream = 0;
};

/// LED color as a function of (state, goal_founder, anchored).
SignalColor led_for(RobotState state, bool goal_founder, bool anchored);

/// Robots in these states never move except through optimization repositioning.
inline bool is_static_state(RobotState s, bool anchored) {
  return s == RobotState::Recovery || s == RobotState::HeuristicOpt1 ||
         s == RobotState::HeuristicOpt2 || (s == RobotState::Subgoal && anchored);
}

}  // namespace swarmpath
