#include "swarmpath/world.hpp"

#include <algorithm>
#include <limits>

namespace swarmpath {

std::string_view to_string(RobotState s) {
  switch (s) {
    case RobotState::Resting: return "Resting";
    case RobotState::Exploring: return "Exploring";
    case RobotState::ReturnToNest: return "ReturnToNest";
    case RobotState::Subgoal: return "Subgoal";
    case RobotState::DecisionMaking: return "DecisionMaking";
    case RobotState::Recovery: return "Recovery";
    case RobotState::HeuristicOpt1: return "HeuristicOpt1";
    case RobotState::HeuristicOpt2: return "HeuristicOpt2";
  }
  return "?";
}

std::string_view to_string(SignalColor c) {
  switch (c) {
    case SignalColor::Black: return "black";
    case SignalColor::Cyan: return "cyan";
    case SignalColor::Red: return "red";
    case SignalColor::Blue: return "blue";
    case SignalColor::RedYellow: return "red-yellow";
    case SignalColor::FounderMagenta: return "founder-magenta";
    case SignalColor::Magenta: return "magenta";
    case SignalColor::IntenseMagenta: return "intense-magenta";
    case SignalColor::White: return "white";
    case SignalColor::NestBlue: return "nest-blue";
    case SignalColor::GoalPink: return "goal-pink";
  }
  return "?";
}

SignalColor led_for(RobotState state, bool goal_founder, bool anchored) {
  switch (state) {
    case RobotState::Resting: return SignalColor::White;
    case RobotState::Exploring: return SignalColor::Black;
    case RobotState::ReturnToNest:
      return goal_founder ? SignalColor::FounderMagenta : SignalColor::Cyan;
    case RobotState::Subgoal: return anchored ? SignalColor::Red : SignalColor::White;
    case RobotState::DecisionMaking:
      return goal_founder ? SignalColor::FounderMagenta : SignalColor::IntenseMagenta;
    case RobotState::Recovery: return SignalColor::Magenta;
    case RobotState::HeuristicOpt1: return SignalColor::Blue;
    case RobotState::HeuristicOpt2: return SignalColor::RedYellow;
  }
  return SignalColor::Black;
}

void ArenaSpec::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("arena: width and height must be > 0");
  if (!(nest.radius > 0.0) || !(goal.radius > 0.0)) throw ConfigError("arena: landmark radius must be > 0");
  if (!(reference_intensity > 0.0)) throw ConfigError("arena: reference_intensity must be > 0");
  const Rect b = bounds();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Rect& o = obstacles[i];
    if (!(o.min.x < o.max.x && o.min.y < o.max.y))
      throw ConfigError("arena: obstacles[" + std::to_string(i) + "] is empty");
    if (!b.contains(o.min) || !b.contains(o.max))
      throw ConfigError("arena: obstacles[" + std::to_string(i) + "] leaves the arena");
  }
  for (const auto* d : {&nest, &goal}) {
    const char* which = d == &nest ? "nest" : "goal";
    if (!b.inflated(-d->radius).contains(d->center))
      throw ConfigError(std::string("arena: ") + which + " disk leaves the arena");
    for (const Rect& o : obstacles)
      if (disk_overlaps_rect(d->center, d->radius, o))
        throw ConfigError(std::string("arena: ") + which + " disk intersects an obstacle");
  }
}

bool segment_intersects_obstacle(Vec2 p1, Vec2 p2, const ArenaSpec& arena) {
  if (p1 == p2) return false;
  const Vec2 d = p2 - p1;
  for (const Rect& r : arena.obstacles) {
    // Open slab clipping: the interior is a product of open intervals.
    double lo = 0.0;
    double hi = 1.0;
    bool empty = false;
    for (int axis = 0; axis < 2 && !empty; ++axis) {
      const double p = axis == 0 ? p1.x : p1.y;
      const double dd = axis == 0 ? d.x : d.y;
      const double mn = axis == 0 ? r.min.x : r.min.y;
      const double mx = axis == 0 ? r.max.x : r.max.y;
      if (dd == 0.0) {
        if (!(p > mn && p < mx)) empty = true;
        continue;
      }
      double t0 = (mn - p) / dd;
      double t1 = (mx - p) / dd;
      if (t0 > t1) std::swap(t0, t1);
      lo = std::max(lo, t0);
      hi = std::min(hi, t1);
      if (!(lo < hi)) empty = true;
    }
    if (!empty && lo < hi) return true;
  }
  return false;
}

VisibilityResult line_of_sight(Vec2 observer, Vec2 target, const ArenaSpec& arena,
                               double max_range) {
  VisibilityResult r;
  r.range = distance(observer, target);
  if (r.range > max_range) {
    r.out_of_range = true;
    return r;
  }
  r.occluded_by_obstacle = segment_intersects_obstacle(observer, target, arena);
  r.visible = !r.occluded_by_obstacle;
  return r;
}

double light_reading(Vec2 pos, const ArenaSpec& arena, double saturation) {
  const double x = distance(pos, arena.light_source());
  if (x < 1e-9) return saturation;
  const double ratio = arena.reference_intensity / x;
  return std::min(ratio * ratio, saturation);
}

Vec2 nest_potential_vector(Vec2 pos, const ArenaSpec& arena) {
  const Vec2 to_nest = arena.nest.center - pos;
  if (to_nest.norm() < 1e-12) return {};
  return to_nest.normalized();
}

Vec2 diffusion_vector(std::span<const ProximityReading> readings) {
  Vec2 sum;
  for (const auto& r : readings) sum += Vec2::polar(r.value, r.bearing);
  return -sum;
}

namespace {

bool blob_less(const Blob& a, const Blob& b) {
  if (a.range != b.range) return a.range < b.range;
  return a.source_id < b.source_id;
}

std::vector<const Robot*> pointers(std::span<const Robot> robots) {
  std::vector<const Robot*> out;
  out.reserve(robots.size());
  for (const Robot& r : robots) out.push_back(&r);
  return out;
}

}  // namespace

std::vector<Blob> detect_blobs(const Robot& observer, std::span<const Robot> robots,
                               const ArenaSpec& arena, double max_range) {
  return detect_blobs(observer, std::span<const Robot* const>(pointers(robots)), arena, max_range);
}

std::vector<ProximityReading> sense_proximity(const Pose& pose, double body_radius,
                                              std::span<const Robot> robots,
                                              std::int32_t self_id,
                                              const ArenaSpec& arena) {
  return sense_proximity(pose, body_radius, std::span<const Robot* const>(pointers(robots)),
                         self_id, arena);
}

std::vector<Blob> detect_blobs(const Robot& observer, std::span<const Robot* const> robots,
                               const ArenaSpec& arena, double max_range) {
  std::vector<Blob> blobs;
  const Vec2 o = observer.pose.position;
  auto consider = [&](Vec2 p, SignalColor color, std::int32_t source) {
    const VisibilityResult v = line_of_sight(o, p, arena, max_range);
    if (!v.visible) return;
    const double bearing = v.range > 0.0 ? wrap_angle((p - o).angle() - observer.pose.heading) : 0.0;
    blobs.push_back({color, v.range, bearing, source});
  };
  consider(arena.nest.center, SignalColor::NestBlue, kNestSource);
  consider(arena.goal.center, SignalColor::GoalPink, kGoalSource);
  for (const Robot* r : robots) {
    if (r->id == observer.id || r->led == SignalColor::Black) continue;
    consider(r->pose.position, r->led, r->id);
  }
  std::sort(blobs.begin(), blobs.end(), blob_less);
  return blobs;
}

std::vector<ProximityReading> sense_proximity(const Pose& pose, double body_radius,
                                              std::span<const Robot* const> robots,
                                              std::int32_t self_id,
                                              const ArenaSpec& arena) {
  constexpr int n = ProximityRing::kSensorCount;
  constexpr double range = ProximityRing::kRange;
  constexpr double sector = 2.0 * std::numbers::pi / n;
  std::vector<ProximityReading> ring(n);
  for (int i = 0; i < n; ++i) ring[i].bearing = wrap_angle(i * sector);

  const Vec2 c = pose.position;
  auto hit = [&](Vec2 nearest_point, double surface_distance) {
    if (surface_distance >= range) return;
    const double value = std::clamp(1.0 - surface_distance / range, 0.0, 1.0);
    const double bearing = wrap_angle((nearest_point - c).angle() - pose.heading);
    int idx = static_cast<int>(std::lround(bearing / sector));
    idx = ((idx % n) + n) % n;
    ring[idx].value = std::max(ring[idx].value, value);
  };

  // Arena walls.
  hit({0.0, c.y}, c.x - body_radius);
  hit({arena.width, c.y}, arena.width - c.x - body_radius);
  hit({c.x, 0.0}, c.y - body_radius);
  hit({c.x, arena.height}, arena.height - c.y - body_radius);

  for (const Rect& r : arena.obstacles) {
    const Vec2 q = r.clamp(c);
    const double d = distance(q, c);
    if (d > 0.0) hit(q, d - body_radius);
  }
  for (const Robot* other : robots) {
    if (other->id == self_id) continue;
    const Vec2 p = other->pose.position;
    const double d = distance(p, c);
    if (d > 0.0) hit(p, d - 2.0 * body_radius);
  }
  return ring;
}

}  // namespace swarmpath
