#pragma once

#include <cstdint>
#include <vector>

#include "swarmpath/geometry.hpp"

namespace swarmpath {

struct ChainAnchor {
  std::int32_t robot_id = -1;
  Vec2 position;
};

/// Relay of static robots from nest to goal. `anchors` runs nest-side first.
struct SubgoalChain {
  Vec2 nest;
  Vec2 goal;
  std::vector<ChainAnchor> anchors;

  /// nest, anchors..., goal
  std::vector<Vec2> points() const {
    std::vector<Vec2> p;
    p.reserve(anchors.size() + 2);
    p.push_back(nest);
    for (const ChainAnchor& a : anchors) p.push_back(a.position);
    p.push_back(goal);
    return p;
  }
};

}  // namespace swarmpath
