#include "swarmpath/agent.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace swarmpath {

char to_char(Trigger t) { return static_cast<char>('a' + static_cast<int>(t)); }

namespace {

using S = RobotState;
using T = Trigger;

constexpr std::array<Transition, 13> kEdges{{
    {S::HeuristicOpt2, T::a, S::Resting},
    {S::Exploring, T::b, S::ReturnToNest},
    {S::Exploring, T::c, S::Subgoal},
    {S::ReturnToNest, T::d, S::Exploring},
    {S::Exploring, T::e, S::DecisionMaking},
    {S::Subgoal, T::f, S::Recovery},
    {S::Subgoal, T::g, S::HeuristicOpt1},
    {S::HeuristicOpt1, T::h, S::HeuristicOpt2},
    {S::Resting, T::i, S::Exploring},
    {S::Exploring, T::j, S::DecisionMaking},
    {S::DecisionMaking, T::k, S::ReturnToNest},
    {S::DecisionMaking, T::l, S::Resting},
    {S::Recovery, T::m, S::Subgoal},
}};

}  // namespace

std::span<const Transition> transition_table() { return kEdges; }

std::optional<RobotState> next_state(RobotState from, Trigger trigger) {
  for (const Transition& t : kEdges)
    if (t.from == from && t.trigger == trigger) return t.to;
  return std::nullopt;
}

bool edge_allowed(RobotState from, RobotState to) {
  for (const Transition& t : kEdges)
    if (t.from == from && t.to == to) return true;
  return false;
}

void WheelParams::validate() const {
  if (!(no_turn_threshold < soft_turn_threshold && soft_turn_threshold < hard_turn_threshold))
    throw ConfigError("wheel thresholds must satisfy no_turn < soft_turn < hard_turn");
  if (!(max_speed > 0.0)) throw ConfigError("max_speed must be > 0");
}

WheelSpeeds wheel_command(double heading_error, const WheelParams& p) {
  const double mag = std::abs(heading_error);
  const double v = p.max_speed;
  if (mag < p.no_turn_threshold) return {v, v};
  double inner;
  if (mag < p.hard_turn_threshold)
    inner = v * (1.0 - mag / p.hard_turn_threshold);
  else
    inner = -v;
  // Positive error: target to the left, so the left wheel is the inner one.
  return heading_error > 0.0 ? WheelSpeeds{inner, v} : WheelSpeeds{v, inner};
}

int ControllerParams::to_ticks(double seconds) const {
  return static_cast<int>(std::lround(seconds / tick_seconds));
}

void ControllerParams::validate() const {
  wheels.validate();
  if (!(tick_seconds > 0.0)) throw ConfigError("tick_seconds must be > 0");
  if (go_straight_angle_range < 0.0) throw ConfigError("go_straight_angle_range must be >= 0");
  if (!(detect_distance < anchor_distance && anchor_distance < visibility_range))
    throw ConfigError("need detect_distance < anchor_distance < visibility_range");
  if (!(optimization_step > 0.0 && min_optimization_step > 0.0))
    throw ConfigError("optimization steps must be > 0");
  if (!(budget_growth >= 1.0)) throw ConfigError("budget_growth must be >= 1");
  if (complexity_delta < 0.0) throw ConfigError("delta (robot-count) must be >= 0");
}

double alignment_error(const AlignmentGeometry& g) {
  const double between = std::abs(wrap_angle(g.theta1 - g.theta2));
  return std::abs(std::numbers::pi - between);
}

namespace {

double error_at(Vec2 p, Vec2 goal_side, Vec2 nest_side) {
  const Vec2 a = goal_side - p;
  const Vec2 b = nest_side - p;
  return alignment_error({a.angle(), b.angle(), a.norm(), b.norm()});
}

}  // namespace

OptimizationOutcome optimization_step(const Pose& pose, const AlignmentGeometry& geom,
                                      const OptimizationParams& params,
                                      const PlacementCheck& placement_ok) {
  OptimizationOutcome out;
  out.error_before = alignment_error(geom);
  out.error_after = out.error_before;
  if (out.error_before < params.epsilon) {
    out.converged = true;
    return out;
  }
  // Anchors in the body frame; the robot sits at the origin.
  const Vec2 goal_side = Vec2::polar(geom.x_dist, geom.theta1);
  const Vec2 nest_side = Vec2::polar(geom.y_dist, geom.theta2);
  const Vec2 chord = goal_side - nest_side;
  const double chord_len2 = chord.squared_norm();
  if (chord_len2 < 1e-18) {
    out.converged = true;
    return out;
  }
  const double t = -nest_side.dot(chord) / chord_len2;
  const Vec2 foot = nest_side + chord * t;
  const double to_chord = foot.norm();
  if (to_chord < 1e-9) {
    out.converged = true;
    return out;
  }
  const Vec2 dir = foot / to_chord;
  for (double step = std::min(params.step, to_chord); step >= params.min_step; step *= 0.5) {
    const Vec2 body = dir * step;
    const double e = error_at(body, goal_side, nest_side);
    if (!(e < out.error_before)) continue;
    const Vec2 world = body.rotated(pose.heading);
    if (placement_ok && !placement_ok(pose.position + world)) continue;
    out.displacement = world;
    out.error_after = e;
    return out;
  }
  out.converged = true;
  return out;
}

bool recovery_check(const Robot& robot, bool target_visible, double distance_to_target,
                    double visibility_range) {
  if (target_visible) return false;
  if (robot.target_id == kNoSource) return false;
  return distance_to_target <= visibility_range;
}

std::optional<Vec2> recovery_repulsion(Vec2 recovery_pos, Vec2 other_pos, double range) {
  const Vec2 d = other_pos - recovery_pos;
  const double dist = d.norm();
  if (dist > range) return std::nullopt;
  if (dist < 1e-12) return Vec2{1.0, 0.0};
  return d / dist;
}

const Blob* Perception::find(std::int32_t source) const {
  for (const Blob& b : blobs)
    if (b.source_id == source) return &b;
  return nullptr;
}

namespace {

/// World-frame travel vector after obstacle/robot avoidance. Head-on
/// contact slides along the obstacle on the robot's preferred side.
Vec2 avoid(Vec2 desired, const Robot& r, const Perception& p, const ControllerParams& params,
           bool fixed_side = false) {
  Vec2 v = desired.normalized();
  const Vec2 diffusion = diffusion_vector(p.proximity).rotated(r.pose.heading);
  const double strength = diffusion.norm();
  if (strength >= params.delta && v.squared_norm() > 0.0) {
    const Vec2 n = diffusion / strength;
    const double along = v.dot(n);
    if (along < 0.0) {
      Vec2 tangent = v - n * along;
      if (fixed_side || tangent.norm() < 0.2) tangent = n.perp() * static_cast<double>(r.handedness);
      v = tangent.normalized() + n * (0.5 * strength);
    } else {
      v = v + diffusion * 0.5;
    }
  } else if (v.squared_norm() == 0.0 && strength >= params.delta) {
    v = diffusion;
  }
  for (const Blob& b : p.blobs) {
    if (b.color != SignalColor::Magenta || b.source_id < 0) continue;
    if (b.range > params.repulsion_range) break;
    const Vec2 rec = r.pose.position + Vec2::polar(b.range, b.bearing + r.pose.heading);
    if (auto push = recovery_repulsion(rec, r.pose.position, params.repulsion_range))
      v += *push * 2.0;
  }
  return v;
}

Actuation drive_along(const Robot& r, Vec2 v, const ControllerParams& params) {
  if (v.squared_norm() < 1e-18) return Actuation::hold();
  const double error = wrap_angle(v.angle() - r.pose.heading);
  return Actuation::drive(wheel_command(error, params.wheels));
}

Vec2 nestward(const Robot& r, const Perception& p, const ControllerParams& params) {
  return avoid(p.nest_vector, r, p, params);
}

/// In-nest shuffling: only move when something is close.
Actuation settle(const Robot& r, const Perception& p, const ControllerParams& params) {
  const Vec2 diffusion = diffusion_vector(p.proximity).rotated(r.pose.heading);
  if (diffusion.norm() < params.delta) return Actuation::hold();
  return drive_along(r, diffusion, params);
}

bool front_blocked(const Perception& p) {
  for (const ProximityReading& pr : p.proximity)
    if (std::abs(pr.bearing) < std::numbers::pi / 3.0 && pr.value > 0.5) return true;
  return false;
}

bool at_nest(const Perception& p, const ControllerParams& params) {
  return p.nest_distance <= params.nest_reach_radius ||
         (p.nest_distance <= params.crowded_nest_radius && front_blocked(p));
}

std::uint16_t clamp_ticks(int ticks) {
  return static_cast<std::uint16_t>(std::clamp(ticks, 0, 0xFFFF));
}

bool is_alert_color(SignalColor c) {
  return c == SignalColor::FounderMagenta || c == SignalColor::IntenseMagenta ||
         c == SignalColor::Blue || c == SignalColor::RedYellow;
}

class Step {
 public:
  Step(const Robot& robot, const Perception& p, const ControllerParams& params, CounterRng& rng)
      : p_(p), params_(params), rng_(rng) {
    out_.robot = robot;
  }

  StepResult run() {
    switch (r().state) {
      case S::Resting: resting(); break;
      case S::Exploring: exploring(); break;
      case S::ReturnToNest: return_to_nest(); break;
      case S::Subgoal: subgoal(); break;
      case S::DecisionMaking: decision_making(); break;
      case S::Recovery: recovery(); break;
      case S::HeuristicOpt1:
      case S::HeuristicOpt2: optimizing(); break;
    }
    r().led = led_for(r().state, r().goal_founder, r().anchored);
    return std::move(out_);
  }

 private:
  Robot& r() { return out_.robot; }
  const Robot& r_const() const { return out_.robot; }

  void take(Trigger t) {
    if (taken_) throw SimulationFault("second transition requested in one tick");
    const auto to = next_state(r().state, t);
    if (!to)
      throw SimulationFault(std::string("no edge ") + std::string(to_string(r().state)) + " --" +
                            to_char(t) + "-->");
    out_.events.push_back({AgentEventKind::Transition, r().state, *to, t, 0.0, 0.0});
    r().state = *to;
    r().home_best = 1.0e9;
    r().home_stall_ticks = 0;
    r().detour_ticks = 0;
    taken_ = true;
  }

  /// Nest-ward travel with stall detection. Without progress the robot keeps
  /// obstacles on a fixed side; a stall during a detour switches sides.
  Vec2 homeward() {
    Robot& me = r();
    if (p_.nest_distance < me.home_best - params_.homing_progress) {
      me.home_best = p_.nest_distance;
      me.home_stall_ticks = 0;
    } else if (++me.home_stall_ticks >= params_.homing_stall_ticks) {
      if (me.detour_ticks > 0) me.handedness = -me.handedness;
      me.detour_ticks = params_.detour_ticks;
      me.home_stall_ticks = 0;
      me.home_best = p_.nest_distance;
    }
    const bool detour = me.detour_ticks > 0;
    if (detour) --me.detour_ticks;
    return avoid(p_.nest_vector, me, p_, params_, detour);
  }

  void event(AgentEventKind kind, double a = 0.0, double b = 0.0) {
    out_.events.push_back({kind, r().state, r().state, Trigger::a, a, b});
  }

  void send(ProtocolFrame f) { out_.outbox.push_back(f); }

  ProtocolFrame own_frame(FrameFlags flags, std::uint32_t exploring_ticks) const {
    return encode_frame(exploring_ticks, static_cast<std::uint32_t>(out_.robot.id), flags);
  }

  bool unicast_ack_from(std::int32_t sender) const {
    for (const ProtocolFrame& f : p_.inbox) {
      if (f.mode != FrameMode::Unicast || f.unicast_target != out_.robot.id) continue;
      const DecodedFrame d = decode_frame(f);
      if (d.flags.ack && static_cast<std::int32_t>(d.robot_id) == sender) return true;
    }
    return false;
  }

  void start_seeking(std::int32_t target, double range) {
    take(T::c);
    r().anchored = false;
    r().target_id = target;
    r().target_last_range = range;
    r().nest_side_id = kNoSource;
    r().converged = false;
    r().seek_ticks = 0;
  }

  const Blob* anchor_nearby(std::int32_t except) const {
    for (const Blob& b : p_.blobs) {
      if (b.range > params_.duplicate_anchor_radius) break;
      if (b.source_id >= 0 && b.source_id != except && b.color == SignalColor::Red) return &b;
    }
    return nullptr;
  }

  void anchor(double range) {
    r().anchored = true;
    r().anchored_pos = r().pose.position;
    r().children.clear();
    r().nest_defer_ticks = 0;
    event(AgentEventKind::Anchored, range);
    if (r().target_id >= 0) send(make_unicast(own_frame({.request = true}, 0), r().target_id));
  }

  void resting() {
    if (--r().resting_ticks_remaining <= 0) {
      take(T::i);
      r().exploring_ticks = 0;
    }
    out_.actuation = Actuation::hold();
  }

  void exploring() {
    Robot& me = r();
    ++me.exploring_ticks;
    ++me.total_exploring_ticks;
    const bool ta = params_.task_allocation_enabled && !me.task_known;

    if (me.exploring_ticks == 1)
      me.explore_offset = rng_.uniform(-params_.explore_offset_initial, params_.explore_offset_initial);
    me.explore_offset = std::clamp(
        me.explore_offset + rng_.uniform(-params_.go_straight_angle_range, params_.go_straight_angle_range),
        -params_.explore_offset_limit, params_.explore_offset_limit);

    const Blob* goal = p_.find(kGoalSource);
    const Blob* subgoal = nullptr;
    const Blob* recovery_near = nullptr;
    bool alert = false;
    for (const Blob& b : p_.blobs) {
      if (b.source_id < 0) continue;
      if (b.color == SignalColor::Red && !subgoal) subgoal = &b;
      if (b.color == SignalColor::Magenta && !recovery_near && b.range <= params_.repulsion_range)
        recovery_near = &b;
      if (is_alert_color(b.color)) alert = true;
    }

    if (goal && goal->range <= params_.detect_distance) {
      if (ta) {
        take(T::j);
        me.goal_founder = true;
        // Path length is estimated from all the time spent exploring so far.
        me.found_at_exploring_ticks = clamp_ticks(me.total_exploring_ticks);
        me.decision_ticks = 0;
        me.allocation = {};
        out_.claims_founder = true;
        event(AgentEventKind::FounderClaim, me.total_exploring_ticks);
      } else {
        start_seeking(kGoalSource, goal->range);
      }
      out_.actuation = Actuation::hold();
      return;
    }
    if (ta && alert) {
      take(T::e);
      me.decision_ticks = 0;
      me.responded = false;
      out_.actuation = Actuation::hold();
      return;
    }
    if (subgoal && subgoal->range <= params_.detect_distance) {
      start_seeking(subgoal->source_id, subgoal->range);
      out_.actuation = Actuation::hold();
      return;
    }
    if (recovery_near && (goal || subgoal)) {
      // Pushed back at a blind spot: position off the nearest visible anchor instead.
      const Blob* t = goal && (!subgoal || goal->range <= subgoal->range) ? goal : subgoal;
      start_seeking(t->source_id, t->range);
      out_.actuation = Actuation::hold();
      return;
    }
    const Blob* attractor = goal;
    if (subgoal && (!attractor || subgoal->range < attractor->range)) attractor = subgoal;
    if (!attractor && me.exploring_ticks >= me.exploration_budget) {
      take(T::b);
      me.exploration_budget = static_cast<int>(std::ceil(me.exploration_budget * params_.budget_growth));
      me.nest_dwell_ticks = 0;
      out_.actuation = Actuation::hold();
      return;
    }
    out_.actuation = drive_along(me, explore_direction(me, p_, rng_, params_, attractor), params_);
  }

  void begin_exploring() {
    take(T::d);
    r().exploring_ticks = 0;
    r().nest_dwell_ticks = 0;
  }

  void return_to_nest() {
    Robot& me = r();
    if (!at_nest(p_, params_)) {
      out_.actuation = drive_along(me, homeward(), params_);
      return;
    }
    if (me.goal_founder && !me.allocation.finished) {
      allocate();
      return;
    }
    out_.actuation = settle(me, p_, params_);
    if (++me.nest_dwell_ticks >= params_.nest_search_ticks()) begin_exploring();
  }

  /// One tick of the founder's side of the request / ack / termination exchange.
  void allocate() {
    Robot& me = r();
    AllocationProgress& al = me.allocation;
    if (!al.active) {
      al = {};
      al.active = true;
      al.founder_exploring_ticks = me.found_at_exploring_ticks;
      al.n_required = params_.allocation().required_for(me.found_at_exploring_ticks);
    }
    std::vector<std::int32_t> fresh;
    for (const ProtocolFrame& f : p_.inbox) {
      if (f.mode != FrameMode::Unicast || f.unicast_target != me.id) continue;
      const DecodedFrame d = decode_frame(f);
      if (d.flags.ack) fresh.push_back(static_cast<std::int32_t>(d.robot_id));
    }
    std::sort(fresh.begin(), fresh.end());
    for (std::int32_t id : fresh) {
      if (std::find(al.responders.begin(), al.responders.end(), id) != al.responders.end()) continue;
      al.responders.push_back(id);
      if (static_cast<int>(al.accepted.size()) < al.n_required) {
        al.accepted.push_back(id);
        send(make_unicast(own_frame({.ack = true}, al.founder_exploring_ticks), id));
      }
    }
    ++al.window_ticks;
    const bool enough = static_cast<int>(al.accepted.size()) >= al.n_required;
    if (enough || al.window_ticks >= params_.allocation_window_ticks) {
      send(own_frame({.terminate = true}, al.founder_exploring_ticks));
      al.finished = true;
      out_.allocation = allocate_tasks(al.responders, al.n_required);
      event(AgentEventKind::Allocation, al.n_required, static_cast<double>(al.accepted.size()));
      me.task_known = true;
      me.exploration_budget = std::max(
          me.exploration_budget,
          static_cast<int>(std::ceil(me.found_at_exploring_ticks * params_.budget_growth)));
      begin_exploring();
    } else {
      send(own_frame({.request = true}, al.founder_exploring_ticks));
    }
    out_.actuation = Actuation::hold();
  }

  void decision_making() {
    Robot& me = r();
    if (me.goal_founder) {
      take(T::k);
      me.allocation = {};
      out_.actuation = Actuation::hold();
      return;
    }
    ++me.decision_ticks;
    bool accepted = false;
    bool terminated = false;
    const ProtocolFrame* request = nullptr;
    for (const ProtocolFrame& f : p_.inbox) {
      const DecodedFrame d = decode_frame(f);
      const auto sender = static_cast<std::int32_t>(d.robot_id);
      if (f.mode == FrameMode::Unicast) {
        if (f.unicast_target == me.id && d.flags.ack && me.responded && sender == me.founder_id)
          accepted = true;
      } else if (d.flags.terminate) {
        terminated = true;
      } else if (d.flags.request && !request) {
        request = &f;
      }
    }
    if (accepted) {
      take(T::k);
      me.task_known = true;
      me.exploration_budget = std::max(
          me.exploration_budget,
          static_cast<int>(std::ceil(me.found_at_exploring_ticks * params_.budget_growth)));
      me.nest_dwell_ticks = 0;
      out_.actuation = Actuation::hold();
      return;
    }
    if (terminated) {
      take(T::l);
      me.allocated_rest = true;
      me.resting_ticks_remaining = kAllocatedRestTicks;
      out_.actuation = Actuation::hold();
      return;
    }
    if (request && !me.responded) {
      const DecodedFrame d = decode_frame(*request);
      me.responded = true;
      me.founder_id = static_cast<std::int32_t>(d.robot_id);
      me.found_at_exploring_ticks = clamp_ticks(static_cast<int>(d.exploring_ticks));
      send(make_unicast(own_frame({.ack = true}, clamp_ticks(me.total_exploring_ticks)),
                        me.founder_id));
    }
    if (me.decision_ticks >= params_.decision_timeout_ticks) {
      take(T::k);
      me.task_known = true;
      me.nest_dwell_ticks = 0;
      out_.actuation = Actuation::hold();
      return;
    }
    out_.actuation = at_nest(p_, params_) ? settle(me, p_, params_)
                                          : drive_along(me, homeward(), params_);
  }

  void lose_target() {
    take(T::f);
    r().anchored_pos = r().pose.position;
    out_.actuation = Actuation::hold();
  }

  void subgoal() {
    Robot& me = r();
    const Blob* target = p_.find(me.target_id);
    if (!target) {
      // Only way out of a lost track; recovery_check separates a true loss
      // from a target that was never in range.
      const bool loss = recovery_check(me, false, me.target_last_range, params_.visibility_range);
      lose_target();
      out_.events.back().value_a = loss ? 1.0 : 0.0;
      out_.events.back().value_b = me.target_last_range;
      return;
    }
    me.target_last_range = target->range;
    if (!me.anchored) {
      auto step = subgoal_positioning_step(me, *target, p_, params_);
      ++me.seek_ticks;
      const bool stalled =
          me.seek_ticks >= params_.seek_stall_ticks && target->range >= params_.detect_distance;
      if (std::holds_alternative<AnchorEvent>(step) || stalled) {
        out_.actuation = Actuation::hold();
        if (const Blob* taken = anchor_nearby(me.target_id)) {
          // The spot is already held: extend the chain from that anchor instead.
          me.target_id = taken->source_id;
          me.target_last_range = taken->range;
          me.seek_ticks = 0;
          return;
        }
        anchor(target->range);
        return;
      }
      out_.actuation = std::get<Actuation>(step);
      return;
    }
    out_.actuation = Actuation::hold();
    std::int32_t child = kNoSource;
    for (const ProtocolFrame& f : p_.inbox) {
      if (f.mode != FrameMode::Unicast || f.unicast_target != me.id) continue;
      const DecodedFrame d = decode_frame(f);
      const auto sender = static_cast<std::int32_t>(d.robot_id);
      if (d.flags.request && std::find(me.children.begin(), me.children.end(), sender) ==
                                 me.children.end())
        me.children.push_back(sender);
      if (!d.flags.ack) continue;
      const Blob* b = p_.find(sender);
      if (b && b->color == SignalColor::Blue && (child == kNoSource || sender < child)) child = sender;
    }
    if (child != kNoSource) {
      take(T::g);
      me.nest_side_id = child;
      me.converged = false;
      return;
    }
    const Blob* nest = p_.find(kNestSource);
    if (!nest) return;
    if (nearer_child(*nest) && me.nest_defer_ticks < params_.nest_defer_ticks) {
      ++me.nest_defer_ticks;  // alignment runs nest to goal, the child goes first
      return;
    }
    take(T::g);
    me.nest_side_id = kNestSource;
    me.converged = false;
  }

  /// True if an announced child is visible and closer to the nest than this robot.
  bool nearer_child(const Blob& nest) const {
    const Vec2 to_nest = Vec2::polar(nest.range, nest.bearing);
    for (std::int32_t c : r_const().children) {
      const Blob* b = p_.find(c);
      if (!b) continue;
      if (distance(Vec2::polar(b->range, b->bearing), to_nest) < nest.range) return true;
    }
    return false;
  }

  void recovery() {
    Robot& me = r();
    out_.actuation = Actuation::hold();
    const Blob* target = p_.find(me.target_id);
    if (target) {
      take(T::m);
      me.anchored = false;
      me.target_last_range = target->range;
      me.seek_ticks = 0;
    }
  }

  void optimizing() {
    Robot& me = r();
    out_.actuation = Actuation::hold();
    const bool first_pass = me.state == S::HeuristicOpt1;
    if (!me.converged) {
      const Blob* goal_side = p_.find(me.target_id);
      const Blob* nest_side = p_.find(me.nest_side_id);
      if (!goal_side || !nest_side) return;  // paused until both anchors are back
      // The first pass runs against a settled goal-side subgoal. A target that
      // is itself aligning belongs to another branch and may still move.
      if (first_pass && me.target_id >= 0 && goal_side->color != SignalColor::Red) return;
      const AlignmentGeometry geom{goal_side->bearing, nest_side->bearing, goal_side->range,
                                   nest_side->range};
      const OptimizationOutcome o = optimization_step(
          me.pose, geom,
          {params_.optimization_step, params_.min_optimization_step, params_.align_epsilon},
          p_.placement_ok);
      if (o.converged) {
        me.converged = true;
        event(AgentEventKind::Converged, o.error_before, first_pass ? 1.0 : 2.0);
        return;
      }
      event(AgentEventKind::OptimizationStep, o.error_before, o.error_after);
      out_.actuation = Actuation::reposition(me.pose.position + o.displacement);
      return;
    }
    if (first_pass) {
      if (me.target_id == kGoalSource) {
        take(T::h);
        me.converged = false;
        return;
      }
      send(make_unicast(own_frame({.ack = true}, 0), me.target_id));
      const Blob* parent = p_.find(me.target_id);
      if (parent && parent->color == SignalColor::RedYellow && unicast_ack_from(me.target_id)) {
        take(T::h);
        me.converged = false;
      }
      return;
    }
    if (me.nest_side_id == kNestSource) {
      take(T::a);
      me.resting_ticks_remaining = kAllocatedRestTicks;
      event(AgentEventKind::PathComplete);
      return;
    }
    send(make_unicast(own_frame({.ack = true}, 0), me.nest_side_id));
  }

  const Perception& p_;
  const ControllerParams& params_;
  CounterRng& rng_;
  StepResult out_;
  bool taken_ = false;
};

}  // namespace

Vec2 explore_direction(const Robot& robot, const Perception& perception, CounterRng& rng,
                       const ControllerParams& params, const Blob* attractor) {
  Vec2 desired;
  if (attractor) {
    desired = Vec2::polar(1.0, attractor->bearing + robot.pose.heading);
  } else {
    const double spread = params.go_straight_angle_range;
    const double perturbation = spread > 0.0 ? rng.uniform(-spread, spread) : 0.0;
    desired = (-perception.nest_vector).rotated(robot.explore_offset + perturbation);
  }
  return avoid(desired, robot, perception, params);
}

Actuation explore_step(Robot& robot, const Perception& perception, CounterRng& rng,
                       const ControllerParams& params, const Blob* attractor) {
  ++robot.exploring_ticks;
  return drive_along(robot, explore_direction(robot, perception, rng, params, attractor), params);
}

std::variant<Actuation, AnchorEvent> subgoal_positioning_step(const Robot& robot,
                                                              const Blob& target_blob,
                                                              const Perception& perception,
                                                              const ControllerParams& params) {
  const double lower = params.anchor_distance - params.anchor_tolerance;
  // Nothing further nest-ward than the nest itself.
  if (target_blob.range >= lower ||
      (perception.nest_distance < 0.05 && target_blob.range >= params.detect_distance))
    return AnchorEvent{robot.pose.position, target_blob.range};
  return drive_along(robot, nestward(robot, perception, params), params);
}

StepResult step_fsm(const Robot& robot, const Perception& perception,
                    const ControllerParams& params, CounterRng& rng) {
  return Step(robot, perception, params, rng).run();
}

Robot make_robot(std::int32_t id, Pose pose, const ControllerParams& params, CounterRng& rng) {
  Robot r;
  r.id = id;
  r.pose = pose;
  r.state = RobotState::Resting;
  r.resting_ticks_remaining =
      params.minimum_resting_ticks() +
      static_cast<int>(rng.uniform_int(0, std::max(0, params.initial_rest_stagger_ticks)));
  r.exploration_budget = params.initial_exploring_ticks();
  r.handedness = rng.uniform() < 0.5 ? -1 : 1;
  r.rng_stream = static_cast<std::uint64_t>(id);
  r.led = led_for(r.state, false, false);
  return r;
}

}  // namespace swarmpath
