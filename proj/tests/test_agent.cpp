#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "swarmpath/agent.hpp"

using namespace swarmpath;

namespace {

constexpr double kPi = std::numbers::pi;

Robot robot_in(RobotState s, Vec2 p = {4.0, 2.0}, double heading = 0.0) {
  Robot r;
  r.id = 1;
  r.pose = {p, heading};
  r.state = s;
  r.exploration_budget = 100;
  r.led = led_for(s, false, false);
  return r;
}

Perception away_from_nest(double nest_distance = 3.0) {
  Perception p;
  p.nest_vector = {-1.0, 0.0};
  p.nest_distance = nest_distance;
  p.proximity.resize(ProximityRing::kSensorCount);
  for (int i = 0; i < ProximityRing::kSensorCount; ++i)
    p.proximity[static_cast<std::size_t>(i)].bearing =
        wrap_angle(i * 2.0 * kPi / ProximityRing::kSensorCount);
  return p;
}

bool has_transition(const StepResult& s, RobotState from, Trigger t, RobotState to) {
  for (const AgentEvent& e : s.events)
    if (e.kind == AgentEventKind::Transition && e.from == from && e.trigger == t && e.to == to)
      return true;
  return false;
}

double error_at(Vec2 p, Vec2 goal_side, Vec2 nest_side) {
  const Vec2 a = goal_side - p;
  const Vec2 b = nest_side - p;
  return alignment_error({a.angle(), b.angle(), a.norm(), b.norm()});
}

}  // namespace

TEST_CASE("transition table examples") {
  CHECK(next_state(RobotState::Resting, Trigger::i) == RobotState::Exploring);
  CHECK(next_state(RobotState::Exploring, Trigger::b) == RobotState::ReturnToNest);
  CHECK_FALSE(next_state(RobotState::Resting, Trigger::c).has_value());
}

TEST_CASE("transition table lists every labelled edge once") {
  const auto table = transition_table();
  CHECK(table.size() == 13);
  std::set<std::pair<int, int>> keys;
  for (const Transition& t : table)
    CHECK(keys.insert({static_cast<int>(t.from), static_cast<int>(t.trigger)}).second);
  CHECK(next_state(RobotState::HeuristicOpt2, Trigger::a) == RobotState::Resting);
  CHECK(next_state(RobotState::Exploring, Trigger::c) == RobotState::Subgoal);
  CHECK(next_state(RobotState::ReturnToNest, Trigger::d) == RobotState::Exploring);
  CHECK(next_state(RobotState::Exploring, Trigger::e) == RobotState::DecisionMaking);
  CHECK(next_state(RobotState::Subgoal, Trigger::f) == RobotState::Recovery);
  CHECK(next_state(RobotState::Subgoal, Trigger::g) == RobotState::HeuristicOpt1);
  CHECK(next_state(RobotState::HeuristicOpt1, Trigger::h) == RobotState::HeuristicOpt2);
  CHECK(next_state(RobotState::Exploring, Trigger::j) == RobotState::DecisionMaking);
  CHECK(next_state(RobotState::DecisionMaking, Trigger::k) == RobotState::ReturnToNest);
  CHECK(next_state(RobotState::DecisionMaking, Trigger::l) == RobotState::Resting);
  CHECK(next_state(RobotState::Recovery, Trigger::m) == RobotState::Subgoal);
  CHECK_FALSE(edge_allowed(RobotState::Resting, RobotState::Subgoal));
}

TEST_CASE("wheel command examples") {
  const WheelParams w;
  CHECK(wheel_command(0.0, w) == WheelSpeeds{10.0, 10.0});
  CHECK(wheel_command(kPi, w) == WheelSpeeds{-10.0, 10.0});
  const WheelSpeeds soft = wheel_command(deg_to_rad(45.0), w);
  CHECK(soft.right == 10.0);
  CHECK(soft.left == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(wheel_command(deg_to_rad(9.9), w) == WheelSpeeds{10.0, 10.0});
  CHECK(wheel_command(deg_to_rad(90.0), w) == WheelSpeeds{-10.0, 10.0});
}

TEST_CASE("wheel command is odd in the error") {
  const WheelParams w;
  for (int k = -180; k <= 180; ++k) {
    const double e = deg_to_rad(k);
    const WheelSpeeds a = wheel_command(e, w);
    const WheelSpeeds b = wheel_command(-e, w);
    if (std::abs(e) >= kPi) continue;  // +pi and -pi are the same heading
    CHECK(a.left == b.right);
    CHECK(a.right == b.left);
  }
}

TEST_CASE("wheel thresholds must be ordered") {
  WheelParams w;
  w.soft_turn_threshold = deg_to_rad(5.0);
  CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("resting robot with no rest left starts exploring") {
  Robot r = robot_in(RobotState::Resting);
  r.resting_ticks_remaining = 0;
  CounterRng rng(1, 1, 1);
  const StepResult s = step_fsm(r, away_from_nest(), ControllerParams{}, rng);
  CHECK(s.robot.state == RobotState::Exploring);
  CHECK(has_transition(s, RobotState::Resting, Trigger::i, RobotState::Exploring));
  CHECK(s.robot.led == SignalColor::Black);
}

TEST_CASE("explorer at its budget without a goal returns to the nest") {
  Robot r = robot_in(RobotState::Exploring);
  r.exploring_ticks = r.exploration_budget - 1;  // this tick uses the last one
  CounterRng rng(1, 1, 1);
  const StepResult s = step_fsm(r, away_from_nest(), ControllerParams{}, rng);
  CHECK(s.robot.state == RobotState::ReturnToNest);
  CHECK(has_transition(s, RobotState::Exploring, Trigger::b, RobotState::ReturnToNest));
  CHECK(s.robot.exploration_budget == 150);
}

TEST_CASE("explorer that sees the goal close by") {
  Robot r = robot_in(RobotState::Exploring);
  Perception p = away_from_nest();
  p.blobs.push_back({SignalColor::GoalPink, 0.25, 0.3, kGoalSource});

  SUBCASE("without task allocation it seeks a subgoal position") {
    ControllerParams params;
    params.task_allocation_enabled = false;
    CounterRng rng(1, 1, 1);
    const StepResult s = step_fsm(r, p, params, rng);
    CHECK(s.robot.state == RobotState::Subgoal);
    CHECK(s.robot.target_id == kGoalSource);
    CHECK_FALSE(s.robot.anchored);
  }
  SUBCASE("with task allocation it becomes the goal founder") {
    CounterRng rng(1, 1, 1);
    r.total_exploring_ticks = 299;
    const StepResult s = step_fsm(r, p, ControllerParams{}, rng);
    CHECK(s.robot.state == RobotState::DecisionMaking);
    CHECK(s.robot.goal_founder);
    CHECK(s.claims_founder);
    CHECK(s.robot.found_at_exploring_ticks == 300);
    CHECK(s.robot.led == SignalColor::FounderMagenta);
  }
}

TEST_CASE("goal beyond the detection distance does not trigger") {
  Robot r = robot_in(RobotState::Exploring);
  Perception p = away_from_nest();
  p.blobs.push_back({SignalColor::GoalPink, 0.45, 0.0, kGoalSource});
  CounterRng rng(1, 1, 1);
  const StepResult s = step_fsm(r, p, ControllerParams{}, rng);
  CHECK(s.robot.state == RobotState::Exploring);
  CHECK(s.events.empty());
}

TEST_CASE("explorer without noise heads straight away from the nest") {
  ControllerParams params;
  params.go_straight_angle_range = 0.0;
  Robot r = robot_in(RobotState::Exploring, {4.0, 2.0}, 0.4);
  r.explore_offset = 0.0;
  CounterRng rng(1, 1, 1);
  const Vec2 d = explore_direction(r, away_from_nest(), rng, params);
  CHECK(d.x == doctest::Approx(1.0));
  CHECK(d.y == doctest::Approx(0.0));
}

TEST_CASE("explorer heading sequence replays under the same seed") {
  auto run = [](std::uint64_t seed) {
    std::vector<double> headings;
    Robot r = robot_in(RobotState::Exploring);
    r.explore_offset = 0.1;
    for (std::uint64_t t = 0; t < 50; ++t) {
      CounterRng rng(seed, 1, t);
      headings.push_back(explore_direction(r, away_from_nest(), rng, ControllerParams{}).angle());
    }
    return headings;
  };
  CHECK(run(9) == run(9));
  CHECK(run(9) != run(10));
  for (double h : run(9)) CHECK(std::abs(h - 0.1) <= deg_to_rad(5.0) + 1e-12);
}

TEST_CASE("wall ahead deflects the explorer along the diffusion vector") {
  ControllerParams params;
  params.go_straight_angle_range = 0.0;
  Robot r = robot_in(RobotState::Exploring);
  r.explore_offset = 0.0;
  Perception p = away_from_nest();
  p.proximity[0].value = 0.9;  // dead ahead
  p.proximity[1].value = 0.6;  // slightly to the left
  CounterRng rng(1, 1, 1);
  const Vec2 d = explore_direction(r, p, rng, params);
  const Vec2 diffusion = diffusion_vector(p.proximity);
  // The travel vector no longer points into the wall and has a component
  // along the diffusion push.
  CHECK(d.x < 1.0);
  CHECK(d.normalized().dot(diffusion.normalized()) > Vec2{1.0, 0.0}.dot(diffusion.normalized()));
  CHECK(d.y < 0.0);
}

TEST_CASE("subgoal positioning examples") {
  const ControllerParams params;
  const Robot r = robot_in(RobotState::Subgoal);
  const Perception p = away_from_nest();
  auto at = [&](double range) {
    return subgoal_positioning_step(r, {SignalColor::GoalPink, range, kPi, kGoalSource}, p, params);
  };
  CHECK(std::holds_alternative<AnchorEvent>(at(0.70)));
  CHECK(std::holds_alternative<AnchorEvent>(at(0.71)));
  CHECK(std::holds_alternative<AnchorEvent>(at(0.68)));
  const auto moving = at(0.30);
  REQUIRE(std::holds_alternative<Actuation>(moving));
  const Actuation a = std::get<Actuation>(moving);
  CHECK(a.kind == Actuation::Kind::Wheels);
  CHECK(std::holds_alternative<Actuation>(at(0.60)));
}

TEST_CASE("seeking robot anchors and turns red") {
  Robot r = robot_in(RobotState::Subgoal);
  r.target_id = kGoalSource;
  Perception p = away_from_nest();
  p.blobs.push_back({SignalColor::GoalPink, 0.70, kPi, kGoalSource});
  CounterRng rng(1, 1, 1);
  const StepResult s = step_fsm(r, p, ControllerParams{}, rng);
  CHECK(s.robot.anchored);
  CHECK(s.robot.anchored_pos == r.pose.position);
  CHECK(s.robot.led == SignalColor::Red);
  CHECK(s.actuation.kind == Actuation::Kind::Hold);
}

TEST_CASE("recovery check examples") {
  Robot r = robot_in(RobotState::Subgoal);
  r.target_id = 12;
  CHECK_FALSE(recovery_check(r, true, 0.5));
  CHECK(recovery_check(r, false, 0.9));
  Robot fresh = robot_in(RobotState::Exploring);
  CHECK_FALSE(recovery_check(fresh, false, 1.2));
  CHECK_FALSE(recovery_check(r, false, 1.2));
}

TEST_CASE("anchored robot that loses its target enters recovery") {
  Robot r = robot_in(RobotState::Subgoal);
  r.anchored = true;
  r.target_id = 5;
  r.target_last_range = 0.7;
  CounterRng rng(1, 1, 1);
  const StepResult s = step_fsm(r, away_from_nest(), ControllerParams{}, rng);
  CHECK(s.robot.state == RobotState::Recovery);
  CHECK(s.robot.led == SignalColor::Magenta);
  CHECK(s.robot.pose.position == r.pose.position);
}

TEST_CASE("recovery repulsion examples") {
  const auto push = recovery_repulsion({1.0, 1.0}, {1.1, 1.0});
  REQUIRE(push.has_value());
  CHECK(push->x == doctest::Approx(1.0));
  CHECK(push->y == doctest::Approx(0.0));
  CHECK_FALSE(recovery_repulsion({1.0, 1.0}, {1.25, 1.0}).has_value());
  CHECK(recovery_repulsion({1.0, 1.0}, {1.0, 1.0}) == Vec2{1.0, 0.0});
}

TEST_CASE("alignment error examples") {
  CHECK(alignment_error({0.0, kPi, 0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(alignment_error({0.0, kPi / 2, 1.0, 1.0}) == doctest::Approx(kPi / 2));
  CHECK(error_at({1.0, 0.0}, {2.0, 0.0}, {0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("alignment error is invariant under rigid rotation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ua(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p{u(rng), u(rng)}, g{u(rng), u(rng)}, n{u(rng), u(rng)};
    const double rot = ua(rng);
    const Vec2 shift{u(rng), u(rng)};
    const double e0 = error_at(p, g, n);
    const double e1 = error_at(p.rotated(rot) + shift, g.rotated(rot) + shift, n.rotated(rot) + shift);
    CHECK(e1 == doctest::Approx(e0).epsilon(1e-9));
  }
}

TEST_CASE("optimization converges immediately when aligned") {
  const OptimizationOutcome o =
      optimization_step({{0, 0}, 0.0}, {0.0, kPi, 0.6, 0.6}, OptimizationParams{}, {});
  CHECK(o.converged);
  CHECK(o.displacement == Vec2{});
}

TEST_CASE("optimization error never increases over accepted steps") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> off(-0.6, 0.6), uh(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 nest_side{0.0, 0.0}, goal_side{1.2, 0.0};
    Pose pose{{0.6 + off(rng) * 0.3, off(rng)}, uh(rng)};
    double last = error_at(pose.position, goal_side, nest_side);
    int steps = 0;
    for (; steps < 500; ++steps) {
      const Vec2 a = goal_side - pose.position, b = nest_side - pose.position;
      const AlignmentGeometry g{wrap_angle(a.angle() - pose.heading),
                                wrap_angle(b.angle() - pose.heading), a.norm(), b.norm()};
      const OptimizationOutcome o = optimization_step(pose, g, OptimizationParams{}, {});
      if (o.converged) break;
      CHECK(o.error_after < o.error_before);
      CHECK(o.error_before <= last + 1e-9);
      pose.position += o.displacement;
      last = error_at(pose.position, goal_side, nest_side);
      CHECK(last == doctest::Approx(o.error_after).epsilon(1e-9));
    }
    CHECK(steps < 500);
  }
}

TEST_CASE("optimization respects the placement check") {
  const Pose pose{{0.6, 0.3}, 0.0};
  const Vec2 a = Vec2{1.2, 0.0} - pose.position, b = Vec2{0.0, 0.0} - pose.position;
  const AlignmentGeometry g{a.angle(), b.angle(), a.norm(), b.norm()};
  const OptimizationOutcome blocked =
      optimization_step(pose, g, OptimizationParams{}, [](Vec2) { return false; });
  CHECK(blocked.converged);
  CHECK(blocked.displacement == Vec2{});
  const OptimizationOutcome moved = optimization_step(pose, g, OptimizationParams{}, {});
  CHECK_FALSE(moved.converged);
  CHECK(moved.displacement.y < 0.0);
  CHECK(moved.displacement.norm() == doctest::Approx(0.05));
}

TEST_CASE("first optimization pass signals the sub-nest color") {
  Robot r = robot_in(RobotState::Subgoal);
  r.anchored = true;
  r.target_id = kGoalSource;
  Perception p = away_from_nest();
  p.blobs = {{SignalColor::NestBlue, 0.6, kPi, kNestSource},
             {SignalColor::GoalPink, 0.7, 0.0, kGoalSource}};
  CounterRng rng(1, 1, 1);
  const StepResult s = step_fsm(r, p, ControllerParams{}, rng);
  CHECK(s.robot.state == RobotState::HeuristicOpt1);
  CHECK(s.robot.led == SignalColor::Blue);

  const StepResult conv = step_fsm(s.robot, p, ControllerParams{}, rng);
  CHECK(conv.robot.converged);
  CHECK(conv.robot.led == SignalColor::Blue);
  const StepResult next = step_fsm(conv.robot, p, ControllerParams{}, rng);
  CHECK(next.robot.state == RobotState::HeuristicOpt2);
  CHECK(next.robot.led == SignalColor::RedYellow);
}

TEST_CASE("led color is a function of state") {
  CHECK(led_for(RobotState::Resting, false, false) == SignalColor::White);
  CHECK(led_for(RobotState::Exploring, false, false) == SignalColor::Black);
  CHECK(led_for(RobotState::ReturnToNest, false, false) == SignalColor::Cyan);
  CHECK(led_for(RobotState::ReturnToNest, true, false) == SignalColor::FounderMagenta);
  CHECK(led_for(RobotState::Subgoal, false, true) == SignalColor::Red);
  CHECK(led_for(RobotState::DecisionMaking, false, false) == SignalColor::IntenseMagenta);
  CHECK(led_for(RobotState::Recovery, false, true) == SignalColor::Magenta);
  CHECK(led_for(RobotState::HeuristicOpt1, false, true) == SignalColor::Blue);
  CHECK(led_for(RobotState::HeuristicOpt2, false, true) == SignalColor::RedYellow);
}

TEST_CASE("controller parameter conversions") {
  const ControllerParams p;
  CHECK(p.minimum_resting_ticks() == 1);
  CHECK(p.initial_exploring_ticks() == 10);
  CHECK(p.nest_search_ticks() == 50);
  CHECK(p.speed_mps() == doctest::Approx(0.1));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("anchoring on a robot announces the new child") {
  Robot r = robot_in(RobotState::Subgoal);
  r.target_id = 9;
  Perception p = away_from_nest();
  p.blobs.push_back({SignalColor::Red, 0.70, kPi, 9});
  CounterRng rng(1, 1, 1);
  const StepResult s = step_fsm(r, p, ControllerParams{}, rng);
  REQUIRE(s.robot.anchored);
  REQUIRE(s.outbox.size() == 1);
  CHECK(s.outbox[0].mode == FrameMode::Unicast);
  CHECK(s.outbox[0].unicast_target == 9);
  const DecodedFrame d = decode_frame(s.outbox[0]);
  CHECK(d.robot_id == 1);
  CHECK(d.flags.request);
}

TEST_CASE("nest-adjacent subgoal lets a nearer child align first") {
  Robot r = robot_in(RobotState::Subgoal);
  r.anchored = true;
  r.target_id = kGoalSource;
  Perception p = away_from_nest();
  // Nest 0.9 m behind, child 7 halfway to it.
  p.blobs = {{SignalColor::NestBlue, 0.9, kPi, kNestSource},
             {SignalColor::Red, 0.45, kPi, 7},
             {SignalColor::GoalPink, 0.7, 0.0, kGoalSource}};
  p.inbox = {make_unicast(encode_frame(0, 7, {.request = true}), 1)};
  ControllerParams params;
  params.nest_defer_ticks = 3;
  CounterRng rng(1, 1, 1);
  StepResult s = step_fsm(r, p, params, rng);
  CHECK(s.robot.state == RobotState::Subgoal);
  CHECK(s.robot.children == std::vector<std::int32_t>{7});

  // The child converges and acknowledges: it becomes the nest-side anchor.
  Perception acked = p;
  acked.blobs[1].color = SignalColor::Blue;
  acked.inbox = {make_unicast(encode_frame(0, 7, {.ack = true}), 1)};
  const StepResult joined = step_fsm(s.robot, acked, params, rng);
  CHECK(joined.robot.state == RobotState::HeuristicOpt1);
  CHECK(joined.robot.nest_side_id == 7);

  // Without an acknowledgment the wait is bounded: three ticks in all.
  p.inbox.clear();
  for (int k = 0; k < 2; ++k) {
    s = step_fsm(s.robot, p, params, rng);
    CHECK(s.robot.state == RobotState::Subgoal);
  }
  s = step_fsm(s.robot, p, params, rng);
  CHECK(s.robot.state == RobotState::HeuristicOpt1);
  CHECK(s.robot.nest_side_id == kNestSource);
}

TEST_CASE("first pass holds while the goal-side anchor is aligning") {
  Robot r = robot_in(RobotState::HeuristicOpt1);
  r.anchored = true;
  r.target_id = 4;
  r.nest_side_id = kNestSource;
  Perception p = away_from_nest();
  p.blobs = {{SignalColor::NestBlue, 0.7, kPi - 0.4, kNestSource},
             {SignalColor::Blue, 0.7, 0.0, 4}};
  CounterRng rng(1, 1, 1);
  const StepResult held = step_fsm(r, p, ControllerParams{}, rng);
  CHECK(held.actuation.kind == Actuation::Kind::Hold);
  CHECK(held.events.empty());

  p.blobs[1].color = SignalColor::Red;
  const StepResult moved = step_fsm(r, p, ControllerParams{}, rng);
  CHECK(moved.actuation.kind == Actuation::Kind::Reposition);
  REQUIRE(moved.events.size() == 1);
  CHECK(moved.events[0].kind == AgentEventKind::OptimizationStep);
  CHECK(moved.events[0].value_b < moved.events[0].value_a);
}
