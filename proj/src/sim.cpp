#include "swarmpath/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <set>

#include "swarmpath/perception.hpp"
#include "swarmpath/rng.hpp"

namespace swarmpath {

void SimParams::validate() const {
  controller.validate();
  if (!(body_radius > 0.0)) throw ConfigError("body_radius must be > 0");
  if (deadlock_window <= 0) throw ConfigError("deadlock_window must be > 0");
  if (collision_iterations <= 0) throw ConfigError("collision_iterations must be > 0");
}

std::string_view to_string(SimStatus s) {
  switch (s) {
    case SimStatus::PathFormed: return "PathFormed";
    case SimStatus::Timeout: return "Timeout";
    case SimStatus::Deadlock: return "Deadlock";
  }
  return "?";
}

WorldState make_world(const ArenaSpec& arena, int robot_count, std::uint64_t seed,
                      const SimParams& params) {
  if (robot_count <= 0) throw ConfigError("robot_count must be > 0");
  arena.validate();
  params.validate();
  const double r = params.body_radius;
  const double spacing = 2.0 * r + 0.02;
  const double row = spacing * std::sqrt(3.0) / 2.0;

  std::vector<Vec2> sites;
  const Vec2 nest = arena.nest.center;
  const int rows = static_cast<int>(arena.height / row) + 2;
  const int cols = static_cast<int>(arena.width / spacing) + 2;
  for (int j = -rows; j <= rows; ++j) {
    for (int i = -cols; i <= cols; ++i) {
      const Vec2 p = nest + Vec2{(i + (j & 1) * 0.5) * spacing, j * row};
      if (p.x < r + 0.01 || p.y < r + 0.01 || p.x > arena.width - r - 0.01 ||
          p.y > arena.height - r - 0.01)
        continue;
      bool blocked = false;
      for (const Rect& o : arena.obstacles) blocked = blocked || disk_overlaps_rect(p, r + 0.01, o);
      if (!blocked) sites.push_back(p);
    }
  }
  std::sort(sites.begin(), sites.end(), [&](Vec2 a, Vec2 b) {
    const double da = (a - nest).squared_norm();
    const double db = (b - nest).squared_norm();
    if (da != db) return da < db;
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  if (sites.size() < static_cast<std::size_t>(robot_count))
    throw ConfigError("arena has room for only " + std::to_string(sites.size()) + " robots");
  sites.resize(static_cast<std::size_t>(robot_count));

  CounterRng placement(seed, 0xFFFFFFFFull, 0);
  std::vector<int> ids(static_cast<std::size_t>(robot_count));
  for (int i = 0; i < robot_count; ++i) ids[static_cast<std::size_t>(i)] = i;
  for (int i = robot_count - 1; i > 0; --i)
    std::swap(ids[static_cast<std::size_t>(i)],
              ids[static_cast<std::size_t>(placement.uniform_int(0, i))]);

  WorldState w;
  w.seed = seed;
  w.arena = arena;
  w.robots.resize(static_cast<std::size_t>(robot_count));
  for (int k = 0; k < robot_count; ++k) {
    const int id = ids[static_cast<std::size_t>(k)];
    CounterRng rng(seed, static_cast<std::uint64_t>(id), 0xFFFFFFFFull);
    const Pose pose{sites[static_cast<std::size_t>(k)], rng.uniform(-std::numbers::pi, std::numbers::pi)};
    w.robots[static_cast<std::size_t>(id)] = make_robot(id, pose, params.controller, rng);
  }
  w.inboxes.resize(w.robots.size());
  for (const Robot& rb : w.robots) w.activity_reference.push_back(rb.pose.position);
  return w;
}

namespace {

bool movable(const Robot& r) { return !is_static_state(r.state, r.anchored); }

/// Pushes a disk out of the walls and obstacles. Returns true if it moved.
bool push_out_of_arena(Vec2& c, double r, const ArenaSpec& arena) {
  bool moved = false;
  for (const Rect& o : arena.obstacles) {
    if (!disk_overlaps_rect(c, r, o)) continue;
    const Vec2 q = o.clamp(c);
    const Vec2 d = c - q;
    const double n = d.norm();
    if (n > 1e-12) {
      c = q + d / n * r;
    } else {
      // Center inside the obstacle: leave through the nearest face.
      const double left = c.x - o.min.x, right = o.max.x - c.x;
      const double down = c.y - o.min.y, up = o.max.y - c.y;
      const double m = std::min({left, right, down, up});
      if (m == left) c.x = o.min.x - r;
      else if (m == right) c.x = o.max.x + r;
      else if (m == down) c.y = o.min.y - r;
      else c.y = o.max.y + r;
    }
    moved = true;
  }
  const Vec2 clamped{std::clamp(c.x, r, arena.width - r), std::clamp(c.y, r, arena.height - r)};
  if (!(clamped == c)) {
    c = clamped;
    moved = true;
  }
  return moved;
}

bool pose_valid(Vec2 c, double r, const ArenaSpec& arena) {
  const double eps = 1e-9;
  if (c.x < r - eps || c.y < r - eps || c.x > arena.width - r + eps || c.y > arena.height - r + eps)
    return false;
  for (const Rect& o : arena.obstacles)
    if (squared_distance_to_rect(c, o) < (r - eps) * (r - eps)) return false;
  return true;
}

}  // namespace

void resolve_collisions(std::vector<Robot>& robots, std::span<const Pose> prior,
                        const ArenaSpec& arena, double radius, int max_iterations) {
  const std::size_t n = robots.size();
  const double min_sep = 2.0 * radius;
  SpatialGrid grid(arena, std::max(min_sep, 0.25));
  std::vector<const Robot*> near;
  std::vector<char> mov(n);
  for (std::size_t i = 0; i < n; ++i) mov[i] = movable(robots[i]) ? 1 : 0;

  bool clean = false;
  for (int it = 0; it < max_iterations && !clean; ++it) {
    clean = true;
    grid.rebuild(robots);
    for (std::size_t i = 0; i < n; ++i) {
      Robot& a = robots[i];
      if (mov[i] && push_out_of_arena(a.pose.position, radius, arena)) clean = false;
      near.clear();
      grid.near(a.pose.position, min_sep + 0.05, near);
      for (const Robot* op : near) {
        const auto j = static_cast<std::size_t>(op->id);
        if (j <= i) continue;
        Robot& b = robots[j];
        Vec2 d = b.pose.position - a.pose.position;
        const double dist = d.norm();
        if (dist >= min_sep) continue;
        if (!mov[i] && !mov[j]) continue;
        clean = false;
        const Vec2 u = dist > 1e-12 ? d / dist : Vec2{1.0, 0.0};
        const double overlap = min_sep - dist + 1e-9;
        if (mov[i] && mov[j]) {
          a.pose.position -= u * (overlap / 2.0);
          b.pose.position += u * (overlap / 2.0);
        } else if (mov[i]) {
          a.pose.position -= u * overlap;
        } else {
          b.pose.position += u * overlap;
        }
      }
    }
  }

  // Whatever is still in conflict goes back to where it came from.
  for (bool changed = true; changed;) {
    changed = false;
    grid.rebuild(robots);
    for (std::size_t i = 0; i < n; ++i) {
      Robot& a = robots[i];
      const bool a_moved = !(a.pose.position == prior[i].position);
      if (a_moved && !pose_valid(a.pose.position, radius, arena)) {
        a.pose.position = prior[i].position;
        changed = true;
        continue;
      }
      near.clear();
      grid.near(a.pose.position, min_sep, near);
      for (const Robot* op : near) {
        const auto j = static_cast<std::size_t>(op->id);
        if (j == i) continue;
        Robot& b = robots[j];
        if (distance(a.pose.position, b.pose.position) >= min_sep - 1e-9) continue;
        const bool b_moved = !(b.pose.position == prior[j].position);
        // Turning in place never collides, so headings are kept.
        if (a_moved) {
          a.pose.position = prior[i].position;
          changed = true;
        }
        if (b_moved) {
          b.pose.position = prior[j].position;
          changed = true;
        }
        if (a_moved || b_moved) break;
      }
    }
  }
}

namespace {

Pose integrate(const Pose& p, WheelSpeeds w, double wheel_base, double dt) {
  const double vl = w.left / 100.0;
  const double vr = w.right / 100.0;
  const double v = 0.5 * (vl + vr);
  const double omega = (vr - vl) / wheel_base;
  Pose out = p;
  if (std::abs(omega) < 1e-12) {
    out.position += Vec2::polar(v * dt, p.heading);
  } else {
    const double th1 = p.heading + omega * dt;
    out.position.x += v / omega * (std::sin(th1) - std::sin(p.heading));
    out.position.y -= v / omega * (std::cos(th1) - std::cos(p.heading));
    out.heading = wrap_angle(th1);
  }
  return out;
}

StepResult evaluate(const WorldState& state, std::size_t i, const SpatialGrid& grid,
                    const SimParams& params) {
  const Robot& r = state.robots[i];
  const Perception p = perceive(state, i, grid, params);
  CounterRng rng(state.seed, r.rng_stream, static_cast<std::uint64_t>(state.tick));
  return step_fsm(r, p, params.controller, rng);
}

struct PendingStep {
  std::size_t event;  // index into the event log
  std::size_t robot;
  int pass;
  Vec2 target;
};

OptimizationTrace& trace_for(WorldState& s, std::int32_t robot, int pass) {
  for (auto it = s.traces.rbegin(); it != s.traces.rend(); ++it)
    if (it->robot == robot && it->pass == pass) return *it;
  s.traces.push_back({robot, pass, {}, {}});
  return s.traces.back();
}

void deliver(WorldState& s, const std::vector<std::pair<std::int32_t, ProtocolFrame>>& outgoing,
             const SpatialGrid& grid, double range) {
  for (auto& box : s.inboxes) box.clear();
  std::vector<const Robot*> near;
  for (const auto& [sender, frame] : outgoing) {
    const Vec2 from = s.robots[static_cast<std::size_t>(sender)].pose.position;
    if (frame.mode == FrameMode::Unicast) {
      if (frame.unicast_target < 0 ||
          static_cast<std::size_t>(frame.unicast_target) >= s.robots.size())
        continue;
      const Vec2 to = s.robots[static_cast<std::size_t>(frame.unicast_target)].pose.position;
      if (line_of_sight(from, to, s.arena, range).visible)
        s.inboxes[static_cast<std::size_t>(frame.unicast_target)].push_back(frame);
      continue;
    }
    near.clear();
    grid.near(from, range, near);
    std::sort(near.begin(), near.end(), [](const Robot* a, const Robot* b) { return a->id < b->id; });
    for (const Robot* r : near) {
      if (r->id == sender) continue;
      if (line_of_sight(from, r->pose.position, s.arena, range).visible)
        s.inboxes[static_cast<std::size_t>(r->id)].push_back(frame);
    }
  }
}

}  // namespace

void tick(WorldState& state, const SimParams& params) {
  const std::size_t n = state.robots.size();
  SpatialGrid grid(state.arena, kCameraRange);
  grid.rebuild(state.robots);

  std::vector<StepResult> results(n);
  if (params.kernel == Kernel::Parallel) {
    const int threads = params.threads > 0 ? params.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
      results[static_cast<std::size_t>(i)] =
          evaluate(state, static_cast<std::size_t>(i), grid, params);
  } else {
    for (std::size_t i = 0; i < n; ++i) results[i] = evaluate(state, i, grid, params);
  }

  // Serial commit in id order.
  std::vector<Pose> prior(n);
  std::vector<std::pair<std::int32_t, ProtocolFrame>> outgoing;
  std::vector<PendingStep> steps;
  bool transitioned = false;
  const double dt = params.controller.tick_seconds;
  for (std::size_t i = 0; i < n; ++i) {
    StepResult& res = results[i];
    prior[i] = state.robots[i].pose;
    Robot next = std::move(res.robot);
    const auto id = next.id;

    for (const AgentEvent& e : res.events) {
      state.event_log.push_back({state.tick, id, e});
      if (e.kind == AgentEventKind::Transition) transitioned = true;
      if (e.kind == AgentEventKind::OptimizationStep || e.kind == AgentEventKind::Converged) {
        const int pass = next.state == RobotState::HeuristicOpt2 ? 2 : 1;
        trace_for(state, id, pass);
        if (e.kind == AgentEventKind::OptimizationStep)
          steps.push_back({state.event_log.size() - 1, i, pass, res.actuation.position});
      }
      if (e.kind == AgentEventKind::PathComplete && state.path_root == kNoSource)
        state.path_root = id;
    }
    if (res.claims_founder) {
      if (state.founder == kNoSource) {
        state.founder = id;
      } else {
        next.goal_founder = false;
        next.led = led_for(next.state, false, next.anchored);
        state.event_log.push_back(
            {state.tick, id, {AgentEventKind::FounderRevoked, next.state, next.state}});
      }
    }
    if (res.allocation) state.allocations.push_back({state.tick, id, std::move(*res.allocation)});
    for (const ProtocolFrame& f : res.outbox) outgoing.emplace_back(id, f);

    switch (res.actuation.kind) {
      case Actuation::Kind::Hold: break;
      case Actuation::Kind::Wheels:
        next.pose = integrate(next.pose, res.actuation.wheels, params.controller.wheel_base, dt);
        break;
      case Actuation::Kind::Reposition: next.pose.position = res.actuation.position; break;
    }
    state.robots[i] = std::move(next);
  }

  resolve_collisions(state.robots, prior, state.arena, params.body_radius,
                     params.collision_iterations);
  // A step counts only if the robot actually landed where it planned.
  for (const PendingStep& p : steps) {
    LogEvent& ev = state.event_log[p.event];
    if (!(state.robots[p.robot].pose.position == p.target)) {
      ev.event.kind = AgentEventKind::StepRejected;
      continue;
    }
    OptimizationTrace& t = trace_for(state, state.robots[p.robot].id, p.pass);
    t.before.push_back(ev.event.value_a);
    t.after.push_back(ev.event.value_b);
  }
  grid.rebuild(state.robots);
  deliver(state, outgoing, grid, params.controller.visibility_range);

  ++state.tick;
  bool active = transitioned;
  if (!active) {
    const double lim2 = params.deadlock_displacement * params.deadlock_displacement;
    for (std::size_t i = 0; i < n && !active; ++i)
      active = (state.robots[i].pose.position - state.activity_reference[i]).squared_norm() > lim2;
  }
  if (active) {
    state.last_activity_tick = state.tick;
    for (std::size_t i = 0; i < n; ++i) state.activity_reference[i] = state.robots[i].pose.position;
  }
}

std::optional<SubgoalChain> extract_chain(const WorldState& state, bool raw) {
  if (state.path_root == kNoSource) return std::nullopt;
  SubgoalChain c;
  c.nest = state.arena.nest.center;
  c.goal = state.arena.goal.center;
  std::set<std::int32_t> seen;
  std::int32_t id = state.path_root;
  while (id >= 0) {
    if (!seen.insert(id).second || static_cast<std::size_t>(id) >= state.robots.size())
      return std::nullopt;
    const Robot& r = state.robots[static_cast<std::size_t>(id)];
    c.anchors.push_back({id, raw ? r.anchored_pos : r.pose.position});
    id = r.target_id;
  }
  if (id != kGoalSource) return std::nullopt;
  return c;
}

SimOutcome run_until(WorldState& state, const SimParams& params, std::int64_t max_ticks,
                     const StopCondition& stop, const TickObserver& observer) {
  if (max_ticks <= 0) throw ConfigError("max_ticks must be > 0");
  params.validate();
  SimOutcome out;
  if (observer) observer(state);
  const std::int64_t start = state.tick;
  while (true) {
    if (state.path_root != kNoSource) {
      out.status = SimStatus::PathFormed;
      break;
    }
    if (state.tick - state.last_activity_tick >= params.deadlock_window) {
      out.status = SimStatus::Deadlock;
      break;
    }
    if (state.tick - start >= max_ticks || (stop && stop(state))) {
      out.status = SimStatus::Timeout;
      break;
    }
    tick(state, params);
    if (observer) observer(state);
  }
  out.ticks_elapsed = state.tick - start;
  if (out.status == SimStatus::PathFormed) {
    out.chain = extract_chain(state, false);
    out.raw_chain = extract_chain(state, true);
  }
  for (const Robot& r : state.robots) {
    if (r.state == RobotState::Resting) ++out.robots_resting;
    state.event_log.push_back({state.tick, r.id,
                               {AgentEventKind::FinalPose, r.state, r.state, Trigger::a,
                                r.pose.position.x, r.pose.position.y}});
  }
  out.robots_active = static_cast<int>(state.robots.size()) - out.robots_resting;
  return out;
}

namespace {

struct Fnv {
  std::uint64_t h = kEmptyTraceHash;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

std::string_view kind_name(AgentEventKind k) {
  switch (k) {
    case AgentEventKind::Transition: return "transition";
    case AgentEventKind::Anchored: return "anchored";
    case AgentEventKind::OptimizationStep: return "opt_step";
    case AgentEventKind::Converged: return "converged";
    case AgentEventKind::FounderClaim: return "founder_claim";
    case AgentEventKind::Allocation: return "allocation";
    case AgentEventKind::PathComplete: return "path_complete";
    case AgentEventKind::StepRejected: return "step_rejected";
    case AgentEventKind::FounderRevoked: return "founder_revoked";
    case AgentEventKind::FinalPose: return "final_pose";
  }
  return "?";
}

}  // namespace

std::uint64_t trace_hash(std::span<const LogEvent> log) {
  Fnv f;
  for (const LogEvent& e : log) {
    f.u64(static_cast<std::uint64_t>(e.tick));
    f.u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(e.robot)));
    f.byte(static_cast<std::uint8_t>(e.event.kind));
    f.byte(static_cast<std::uint8_t>(e.event.from));
    f.byte(static_cast<std::uint8_t>(e.event.to));
    f.byte(static_cast<std::uint8_t>(e.event.trigger));
    f.u64(std::bit_cast<std::uint64_t>(e.event.value_a));
    f.u64(std::bit_cast<std::uint64_t>(e.event.value_b));
  }
  return f.h;
}

void write_event_log(std::ostream& out, std::span<const LogEvent> log) {
  char buf[96];
  for (const LogEvent& e : log) {
    out << e.tick << ' ' << e.robot << ' ' << kind_name(e.event.kind);
    if (e.event.kind == AgentEventKind::Transition) {
      out << ' ' << to_string(e.event.from) << ' ' << to_char(e.event.trigger) << ' '
          << to_string(e.event.to);
    } else {
      std::snprintf(buf, sizeof buf, " %.17g %.17g", e.event.value_a, e.event.value_b);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace swarmpath
