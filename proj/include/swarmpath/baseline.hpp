#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "swarmpath/chain.hpp"
#include "swarmpath/world.hpp"

namespace swarmpath {

class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

struct OccupancyGrid {
  double resolution = 0.05;
  Vec2 origin;
  int width = 0;   // cells along x
  int height = 0;  // cells along y
  std::vector<std::uint8_t> occupied;  // row-major, y * width + x

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool blocked(Cell c) const {
    return occupied[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(c.x)] != 0;
  }
  void set(Cell c, bool v) {
    occupied[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) +
             static_cast<std::size_t>(c.x)] = v ? 1 : 0;
  }
  Cell cell_of(Vec2 p) const;
  Vec2 center_of(Cell c) const;
  Rect square_of(Cell c) const;

  static OccupancyGrid empty(int width, int height, double resolution);
};

struct GridPath {
  std::vector<Cell> cells;
  double length = 0.0;  // meters
};

/// A cell is occupied iff its closed square meets an obstacle inflated by
/// `inflation`. The nest and goal centers must land on free cells.
OccupancyGrid rasterize(const ArenaSpec& arena, double resolution, double inflation = 0.085);

/// Minimum-cost 8-connected path under the octile heuristic. Diagonal moves
/// need both orthogonal neighbours free. Throws NoPathError.
GridPath astar(const OccupancyGrid& grid, Cell start, Cell goal);

/// Uniform-cost search with the same cost model. Throws NoPathError.
double dijkstra_oracle(const OccupancyGrid& grid, Cell start, Cell goal);

/// Octile distance between two cells, in meters.
double octile_distance(Cell a, Cell b, double resolution);

/// Euclidean length nest -> anchors -> goal.
double chain_length(const SubgoalChain& chain);

/// A* length between the nest and goal cells of the rasterized arena.
double astar_length(const ArenaSpec& arena, double resolution, double inflation = 0.085);

}  // namespace swarmpath
