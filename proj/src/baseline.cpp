#include "swarmpath/baseline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace swarmpath {

Cell OccupancyGrid::cell_of(Vec2 p) const {
  return {static_cast<int>(std::floor((p.x - origin.x) / resolution)),
          static_cast<int>(std::floor((p.y - origin.y) / resolution))};
}

Vec2 OccupancyGrid::center_of(Cell c) const {
  return origin + Vec2{(c.x + 0.5) * resolution, (c.y + 0.5) * resolution};
}

Rect OccupancyGrid::square_of(Cell c) const {
  const Vec2 lo = origin + Vec2{c.x * resolution, c.y * resolution};
  return {lo, lo + Vec2{resolution, resolution}};
}

OccupancyGrid OccupancyGrid::empty(int width, int height, double resolution) {
  OccupancyGrid g;
  g.resolution = resolution;
  g.width = width;
  g.height = height;
  g.occupied.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  return g;
}

namespace {

// Closed-rectangle meets closed-disk-inflated rectangle: the distance between
// two axis-aligned rectangles is at most the inflation.
bool square_meets_inflated(const Rect& sq, const Rect& ob, double inflation) {
  const double dx = std::max({0.0, ob.min.x - sq.max.x, sq.min.x - ob.max.x});
  const double dy = std::max({0.0, ob.min.y - sq.max.y, sq.min.y - ob.max.y});
  return dx * dx + dy * dy <= inflation * inflation;
}

}  // namespace

OccupancyGrid rasterize(const ArenaSpec& arena, double resolution, double inflation) {
  if (!(resolution > 0.0)) throw ConfigError("resolution must be > 0");
  if (inflation < 0.0) throw ConfigError("inflation must be >= 0");
  OccupancyGrid g = OccupancyGrid::empty(static_cast<int>(std::ceil(arena.width / resolution - 1e-9)),
                                         static_cast<int>(std::ceil(arena.height / resolution - 1e-9)),
                                         resolution);
  for (const Rect& ob : arena.obstacles) {
    const Cell lo = g.cell_of(ob.min - Vec2{inflation, inflation});
    const Cell hi = g.cell_of(ob.max + Vec2{inflation, inflation});
    for (int y = std::max(0, lo.y - 1); y <= std::min(g.height - 1, hi.y + 1); ++y)
      for (int x = std::max(0, lo.x - 1); x <= std::min(g.width - 1, hi.x + 1); ++x)
        if (square_meets_inflated(g.square_of({x, y}), ob, inflation)) g.set({x, y}, true);
  }
  for (const auto& [which, p] : {std::pair{"nest", arena.nest.center}, std::pair{"goal", arena.goal.center}}) {
    const Cell c = g.cell_of(p);
    if (!g.in_bounds(c) || g.blocked(c))
      throw ConfigError(std::string(which) + " cell is occupied after inflation");
  }
  return g;
}

namespace {

// Costs are kept as (orthogonal steps, diagonal steps). Since sqrt(2) is
// irrational two costs are equal only if both counts are.
struct Cost {
  int ortho = 0;
  int diag = 0;
  double value() const { return ortho + diag * std::numbers::sqrt2; }
  Cost operator+(Cost o) const { return {ortho + o.ortho, diag + o.diag}; }
  bool operator==(const Cost&) const = default;
};

bool cost_less(Cost a, Cost b) { return !(a == b) && a.value() < b.value(); }

Cost octile(Cell a, Cell b) {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  const int m = std::min(dx, dy);
  return {dx + dy - 2 * m, m};
}

constexpr std::array<std::array<int, 2>, 8> kMoves{
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

template <typename F>
void for_each_neighbour(const OccupancyGrid& g, Cell c, F&& f) {
  for (const auto& [dx, dy] : kMoves) {
    const Cell n{c.x + dx, c.y + dy};
    if (!g.in_bounds(n) || g.blocked(n)) continue;
    if (dx != 0 && dy != 0 && (g.blocked({c.x + dx, c.y}) || g.blocked({c.x, c.y + dy})))
      continue;  // no corner cutting
    f(n, dx != 0 && dy != 0 ? Cost{0, 1} : Cost{1, 0});
  }
}

void check_endpoints(const OccupancyGrid& g, Cell start, Cell goal) {
  if (!g.in_bounds(start) || g.blocked(start)) throw ConfigError("start cell is not free");
  if (!g.in_bounds(goal) || g.blocked(goal)) throw ConfigError("goal cell is not free");
}

struct Node {
  Cost f;
  Cost h;
  Cell cell;
};

// Priority: lower f, then lower h, then lexicographic cell.
struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    if (!(a.f == b.f)) return cost_less(b.f, a.f);
    if (!(a.h == b.h)) return cost_less(b.h, a.h);
    return b.cell < a.cell;
  }
};

}  // namespace

GridPath astar(const OccupancyGrid& g, Cell start, Cell goal) {
  check_endpoints(g, start, goal);
  const auto idx = [&](Cell c) {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(g.width) +
           static_cast<std::size_t>(c.x);
  };
  const std::size_t n = g.occupied.size();
  std::vector<Cost> best(n);
  std::vector<char> seen(n, 0), closed(n, 0);
  std::vector<Cell> parent(n);
  std::priority_queue<Node, std::vector<Node>, NodeAfter> open;
  best[idx(start)] = {};
  seen[idx(start)] = 1;
  open.push({octile(start, goal), octile(start, goal), start});
  while (!open.empty()) {
    const Node cur = open.top();
    open.pop();
    const std::size_t ci = idx(cur.cell);
    if (closed[ci]) continue;
    closed[ci] = 1;
    if (cur.cell == goal) {
      GridPath p;
      for (Cell c = goal;; c = parent[idx(c)]) {
        p.cells.push_back(c);
        if (c == start) break;
      }
      std::reverse(p.cells.begin(), p.cells.end());
      p.length = best[ci].value() * g.resolution;
      return p;
    }
    for_each_neighbour(g, cur.cell, [&](Cell nb, Cost step) {
      const std::size_t ni = idx(nb);
      if (closed[ni]) return;
      const Cost cand = best[ci] + step;
      if (seen[ni] && !cost_less(cand, best[ni])) return;
      seen[ni] = 1;
      best[ni] = cand;
      parent[ni] = cur.cell;
      const Cost h = octile(nb, goal);
      open.push({cand + h, h, nb});
    });
  }
  throw NoPathError("goal unreachable");
}

double dijkstra_oracle(const OccupancyGrid& g, Cell start, Cell goal) {
  check_endpoints(g, start, goal);
  const auto idx = [&](Cell c) {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(g.width) +
           static_cast<std::size_t>(c.x);
  };
  std::vector<Cost> best(g.occupied.size());
  std::vector<char> seen(g.occupied.size(), 0), done(g.occupied.size(), 0);
  using Entry = std::pair<Cost, Cell>;
  auto after = [](const Entry& a, const Entry& b) {
    if (!(a.first == b.first)) return cost_less(b.first, a.first);
    return b.second < a.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(after)> pq(after);
  seen[idx(start)] = 1;
  pq.push({{}, start});
  while (!pq.empty()) {
    const auto [cost, cell] = pq.top();
    pq.pop();
    if (done[idx(cell)]) continue;
    done[idx(cell)] = 1;
    if (cell == goal) return cost.value() * g.resolution;
    for_each_neighbour(g, cell, [&](Cell nb, Cost step) {
      const Cost cand = cost + step;
      const std::size_t ni = idx(nb);
      if (done[ni] || (seen[ni] && !cost_less(cand, best[ni]))) return;
      seen[ni] = 1;
      best[ni] = cand;
      pq.push({cand, nb});
    });
  }
  throw NoPathError("goal unreachable");
}

double octile_distance(Cell a, Cell b, double resolution) {
  return octile(a, b).value() * resolution;
}

double chain_length(const SubgoalChain& chain) {
  const std::vector<Vec2> p = chain.points();
  double total = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) total += distance(p[i - 1], p[i]);
  return total;
}

double astar_length(const ArenaSpec& arena, double resolution, double inflation) {
  const OccupancyGrid g = rasterize(arena, resolution, inflation);
  return astar(g, g.cell_of(arena.nest.center), g.cell_of(arena.goal.center)).length;
}

}  // namespace swarmpath
