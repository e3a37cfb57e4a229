#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "swarmpath/agent.hpp"
#include "swarmpath/world.hpp"

namespace swarmpath {

struct WorldState;
struct SimParams;

/// Uniform bucket grid over the arena for neighbour queries.
class SpatialGrid {
 public:
  SpatialGrid(const ArenaSpec& arena, double cell);
  void rebuild(const std::vector<Robot>& robots);

  /// Appends every robot whose center may lie within `radius` of p.
  void near(Vec2 p, double radius, std::vector<const Robot*>& out) const;

 private:
  int cell_of(double v, int n) const {
    const int c = static_cast<int>(std::floor(v / cell_));
    return c < 0 ? 0 : (c >= n ? n - 1 : c);
  }
  double cell_;
  int nx_;
  int ny_;
  std::vector<std::vector<const Robot*>> buckets_;
};

/// Whether `self` may stand at `candidate`: inside the arena, clear of
/// obstacles and of every other robot, and still in sight of its anchors.
bool placement_valid(Vec2 candidate, const Robot& self, const WorldState& state,
                     const SpatialGrid& grid, const SimParams& params);

/// Sensor snapshot for robots[index].
Perception perceive(const WorldState& state, std::size_t index, const SpatialGrid& grid,
                    const SimParams& params);

}  // namespace swarmpath
