#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "swarmpath/comms.hpp"
#include "swarmpath/rng.hpp"
#include "swarmpath/robot.hpp"
#include "swarmpath/world.hpp"

namespace swarmpath {

/// Transition labels a..l, plus `m` for a recovery robot taking up subgoal
/// positioning again.
enum class Trigger : std::uint8_t { a, b, c, d, e, f, g, h, i, j, k, l, m };

char to_char(Trigger t);

struct Transition {
  RobotState from;
  Trigger trigger;
  RobotState to;
  bool operator==(const Transition&) const = default;
};

/// The fixed edge set of the controller.
std::span<const Transition> transition_table();
std::optional<RobotState> next_state(RobotState from, Trigger trigger);
bool edge_allowed(RobotState from, RobotState to);

/// Raised when the controller is asked to take an edge that does not exist.
class SimulationFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct WheelParams {
  double hard_turn_threshold = deg_to_rad(90.0);
  double soft_turn_threshold = deg_to_rad(70.0);
  double no_turn_threshold = deg_to_rad(10.0);
  double max_speed = 10.0;  // cm/s, as the differential-steering actuator expects

  void validate() const;
};

struct WheelSpeeds {
  double left = 0.0;
  double right = 0.0;
  bool operator==(const WheelSpeeds&) const = default;
};

/// Three-regime turning rule: straight, soft turn with the inner wheel scaled
/// by (1 - |e|/hard), or pivot. Positive error turns counter-clockwise.
WheelSpeeds wheel_command(double heading_error, const WheelParams& params);

struct ControllerParams {
  // Diffusion
  double go_straight_angle_range = deg_to_rad(5.0);  // half-width
  double delta = 0.1;
  // State timing (seconds)
  double minimum_resting_time = 0.1;
  double initial_exploring_time = 1.0;
  double minimum_search_for_place_in_nest = 5.0;
  WheelParams wheels;

  double tick_seconds = 0.1;
  double wheel_base = 0.14;  // m

  // Subgoal geometry (m)
  double detect_distance = 0.30;
  double anchor_distance = 0.70;
  double anchor_tolerance = 0.02;
  double visibility_range = 1.00;
  double repulsion_range = 0.20;

  // Alignment
  double align_epsilon = 0.05;  // rad
  double optimization_step = 0.05;
  double min_optimization_step = 0.002;

  double budget_growth = 1.5;
  double explore_offset_initial = deg_to_rad(45.0);  // half-width of the per-excursion draw
  double explore_offset_limit = deg_to_rad(80.0);
  double nest_reach_radius = 0.5;
  double crowded_nest_radius = 1.5;
  int initial_rest_stagger_ticks = 100;
  int seek_stall_ticks = 600;
  double duplicate_anchor_radius = 0.35;  // an anchor this close takes over as target
  int nest_defer_ticks = 600;  // wait for a nearer child to align first
  int homing_stall_ticks = 300;
  double homing_progress = 0.05;  // m of nest distance that counts as progress
  int detour_ticks = 600;

  bool task_allocation_enabled = true;
  int allocation_window_ticks = 600;
  int decision_timeout_ticks = 1500;
  double complexity_delta = 2.0;  // delta of the robot-count estimate

  int to_ticks(double seconds) const;
  int minimum_resting_ticks() const { return std::max(1, to_ticks(minimum_resting_time)); }
  int initial_exploring_ticks() const { return std::max(1, to_ticks(initial_exploring_time)); }
  int nest_search_ticks() const { return to_ticks(minimum_search_for_place_in_nest); }
  double speed_mps() const { return wheels.max_speed / 100.0; }
  AllocationParams allocation() const {
    return {speed_mps(), visibility_range, complexity_delta, tick_seconds};
  }

  void validate() const;
};

/// Effectively forever: robots told to rest by the allocation stay put.
inline constexpr int kAllocatedRestTicks = 1 << 29;

struct AlignmentGeometry {
  double theta1 = 0.0;  // bearing to goal-side anchor
  double theta2 = 0.0;  // bearing to nest-side anchor
  double x_dist = 0.0;  // distance to goal-side anchor
  double y_dist = 0.0;  // distance to nest-side anchor
};

/// |pi - angle between the two anchor bearings|; zero when the robot sits on
/// the chord between its anchors.
double alignment_error(const AlignmentGeometry& geom);

struct OptimizationParams {
  double step = 0.05;
  double min_step = 0.002;
  double epsilon = 0.05;
};

struct OptimizationOutcome {
  bool converged = false;
  Vec2 displacement;  // world frame, zero when converged
  double error_before = 0.0;
  double error_after = 0.0;
};

/// Accepts a candidate world position for the robot center.
using PlacementCheck = std::function<bool(Vec2)>;

/// One perpendicular move toward the anchor chord. A move is accepted only if
/// it strictly lowers the alignment error and passes `placement_ok`;
/// otherwise the step is halved until it falls under the minimum, at which
/// point the robot converges in place.
OptimizationOutcome optimization_step(const Pose& pose, const AlignmentGeometry& geom,
                                      const OptimizationParams& params,
                                      const PlacementCheck& placement_ok);

bool recovery_check(const Robot& robot, bool target_visible, double distance_to_target,
                    double visibility_range = 1.00);

/// Unit push away from a recovery robot for anything inside `range`.
/// Coincident points push along +x.
std::optional<Vec2> recovery_repulsion(Vec2 recovery_pos, Vec2 other_pos, double range = 0.20);

struct Actuation {
  enum class Kind : std::uint8_t { Hold, Wheels, Reposition };
  Kind kind = Kind::Hold;
  WheelSpeeds wheels;
  Vec2 position;  // Reposition target

  static Actuation hold() { return {}; }
  static Actuation drive(WheelSpeeds w) { return {Kind::Wheels, w, {}}; }
  static Actuation reposition(Vec2 p) { return {Kind::Reposition, {}, p}; }
};

/// What a robot senses in one tick.
struct Perception {
  std::vector<Blob> blobs;
  std::vector<ProximityReading> proximity;
  Vec2 nest_vector;            // world frame, from the light gradient
  double nest_distance = 0.0;  // recovered from the light intensity
  std::vector<ProtocolFrame> inbox;
  PlacementCheck placement_ok;

  const Blob* find(std::int32_t source) const;
};

enum class AgentEventKind : std::uint8_t {
  Transition,
  Anchored,
  OptimizationStep,
  Converged,
  FounderClaim,
  Allocation,
  PathComplete,
  StepRejected,  // a planned optimization move that collision resolution undid
  // Written by the simulator, never by the controller.
  FounderRevoked,
  FinalPose,
};

struct AgentEvent {
  AgentEventKind kind = AgentEventKind::Transition;
  RobotState from = RobotState::Resting;
  RobotState to = RobotState::Resting;
  Trigger trigger = Trigger::a;
  double value_a = 0.0;
  double value_b = 0.0;
};

struct StepResult {
  Robot robot;
  Actuation actuation;
  std::vector<ProtocolFrame> outbox;
  std::vector<AgentEvent> events;
  bool claims_founder = false;
  std::optional<AllocationResult> allocation;
};

/// Exploring movement: away from the nest, rotated by the robot's wandering
/// offset plus a uniform perturbation inside the go-straight range, deflected
/// by the diffusion vector. An attractor blob, when given, replaces the
/// away-from-nest direction.
Actuation explore_step(Robot& robot, const Perception& perception, CounterRng& rng,
                       const ControllerParams& params, const Blob* attractor = nullptr);

/// Desired world-frame travel direction for an explorer (before wheel mapping).
Vec2 explore_direction(const Robot& robot, const Perception& perception, CounterRng& rng,
                       const ControllerParams& params, const Blob* attractor = nullptr);

struct AnchorEvent {
  Vec2 position;
  double target_range = 0.0;
};

/// Moves a seeking robot nest-ward until it is anchor_distance (within the
/// tolerance) from its target.
std::variant<Actuation, AnchorEvent> subgoal_positioning_step(const Robot& robot,
                                                              const Blob& target_blob,
                                                              const Perception& perception,
                                                              const ControllerParams& params);

/// Advances one robot by one tick. Applies at most one transition.
StepResult step_fsm(const Robot& robot, const Perception& perception,
                    const ControllerParams& params, CounterRng& rng);

/// Fills in a Robot at rest with its initial budget and stagger.
Robot make_robot(std::int32_t id, Pose pose, const ControllerParams& params, CounterRng& rng);

}  // namespace swarmpath
