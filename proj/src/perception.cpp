#include "swarmpath/perception.hpp"

#include <algorithm>

#include "swarmpath/sim.hpp"

namespace swarmpath {

SpatialGrid::SpatialGrid(const ArenaSpec& arena, double cell)
    : cell_(cell),
      nx_(std::max(1, static_cast<int>(std::ceil(arena.width / cell)))),
      ny_(std::max(1, static_cast<int>(std::ceil(arena.height / cell)))),
      buckets_(static_cast<std::size_t>(nx_ * ny_)) {}

void SpatialGrid::rebuild(const std::vector<Robot>& robots) {
  for (auto& b : buckets_) b.clear();
  for (const Robot& r : robots) {
    const int cx = cell_of(r.pose.position.x, nx_);
    const int cy = cell_of(r.pose.position.y, ny_);
    buckets_[static_cast<std::size_t>(cy * nx_ + cx)].push_back(&r);
  }
}

void SpatialGrid::near(Vec2 p, double radius, std::vector<const Robot*>& out) const {
  const int x0 = cell_of(p.x - radius, nx_);
  const int x1 = cell_of(p.x + radius, nx_);
  const int y0 = cell_of(p.y - radius, ny_);
  const int y1 = cell_of(p.y + radius, ny_);
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      for (const Robot* r : buckets_[static_cast<std::size_t>(y * nx_ + x)])
        if ((r->pose.position - p).squared_norm() <= r2) out.push_back(r);
}

namespace {

std::optional<Vec2> anchor_position(std::int32_t id, const WorldState& state) {
  if (id == kNestSource) return state.arena.nest.center;
  if (id == kGoalSource) return state.arena.goal.center;
  if (id < 0 || static_cast<std::size_t>(id) >= state.robots.size()) return std::nullopt;
  return state.robots[static_cast<std::size_t>(id)].pose.position;
}

}  // namespace

bool placement_valid(Vec2 c, const Robot& self, const WorldState& state, const SpatialGrid& grid,
                     const SimParams& params) {
  const double r = params.body_radius;
  const ArenaSpec& arena = state.arena;
  if (c.x < r || c.y < r || c.x > arena.width - r || c.y > arena.height - r) return false;
  for (const Rect& o : arena.obstacles)
    if (disk_overlaps_rect(c, r, o)) return false;
  std::vector<const Robot*> near;
  grid.near(c, 2.0 * r, near);
  for (const Robot* o : near)
    if (o->id != self.id && distance(o->pose.position, c) < 2.0 * r) return false;
  for (std::int32_t anchor : {self.target_id, self.nest_side_id}) {
    if (anchor == kNoSource) continue;
    const auto p = anchor_position(anchor, state);
    if (!p) return false;
    if (!line_of_sight(c, *p, arena, params.controller.visibility_range).visible) return false;
  }
  return true;
}

Perception perceive(const WorldState& state, std::size_t index, const SpatialGrid& grid,
                    const SimParams& params) {
  const Robot& self = state.robots[index];
  Perception p;
  p.inbox = state.inboxes[index];
  if (self.state == RobotState::Resting) return p;

  const ArenaSpec& arena = state.arena;
  const Vec2 c = self.pose.position;
  std::vector<const Robot*> near;
  grid.near(c, kCameraRange, near);
  p.blobs = detect_blobs(self, near, arena, kCameraRange);

  std::erase_if(near, [&](const Robot* o) {
    return distance(o->pose.position, c) >= 2.0 * params.body_radius + ProximityRing::kRange;
  });
  p.proximity = sense_proximity(self.pose, params.body_radius, near, self.id, arena);

  const double light = light_reading(c, arena);
  p.nest_distance = arena.reference_intensity / std::sqrt(light);
  p.nest_vector = nest_potential_vector(c, arena);

  if (self.state == RobotState::HeuristicOpt1 || self.state == RobotState::HeuristicOpt2) {
    const WorldState* s = &state;
    const SpatialGrid* g = &grid;
    const SimParams* sp = &params;
    p.placement_ok = [s, g, sp, &self](Vec2 candidate) {
      return placement_valid(candidate, self, *s, *g, *sp);
    };
  }
  return p;
}

}  // namespace swarmpath
