#include "envsynth/sim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

namespace envsynth::sim {

void PlannerParams::validate() const {
  if (max_linear_velocity <= 0.0 || max_angular_velocity <= 0.0) {
    throw std::invalid_argument("planner velocities must be positive");
  }
  if (sample_count < 1) {
    throw std::invalid_argument("planner sample_count must be at least 1");
  }
  if (inflation_radius < 0.0) {
    throw std::invalid_argument("planner inflation_radius must be non-negative");
  }
  if (recovery_reverse_velocity >= 0.0) {
    throw std::invalid_argument("recovery_reverse_velocity must be negative");
  }
}

std::vector<GridCell> plan_on_occupancy(const WorldMap& map,
                                        const std::vector<std::uint8_t>& occupancy,
                                        GridCell start, GridCell goal) {
  if (!map.in_bounds(start.row, start.col) || !map.in_bounds(goal.row, goal.col)) {
    throw std::invalid_argument("plan_global: cell out of bounds");
  }
  auto occ = [&](int r, int c) {
    return occupancy[static_cast<std::size_t>(r) * map.cols + c] != 0;
  };
  if (occ(start.row, start.col) || occ(goal.row, goal.col)) {
    throw UnreachableError("plan_global: start or goal blocked on the inflated map");
  }

  const std::size_t n = occupancy.size();
  constexpr double kInf = 1e18;
  std::vector<double> g(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  auto idx = [&](int r, int c) { return static_cast<std::size_t>(r) * map.cols + c; };
  auto heuristic = [&](int r, int c) {
    return std::hypot(static_cast<double>(r - goal.row), static_cast<double>(c - goal.col));
  };

  // Min-heap ordered by (f, row, col) for deterministic expansion.
  using Node = std::tuple<double, int, int>;
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  g[idx(start.row, start.col)] = 0.0;
  open.emplace(heuristic(start.row, start.col), start.row, start.col);

  constexpr int dr[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  constexpr int dc[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const double sqrt2 = std::sqrt(2.0);

  while (!open.empty()) {
    const auto [f, r, c] = open.top();
    open.pop();
    const std::size_t cur = idx(r, c);
    if (closed[cur]) continue;
    closed[cur] = 1;
    if (r == goal.row && c == goal.col) break;
    for (int k = 0; k < 8; ++k) {
      const int rr = r + dr[k];
      const int cc = c + dc[k];
      if (rr < 0 || rr >= map.rows || cc < 0 || cc >= map.cols) continue;
      if (occ(rr, cc)) continue;
      const std::size_t nxt = idx(rr, cc);
      if (closed[nxt]) continue;
      const double cost = g[cur] + (k < 4 ? 1.0 : sqrt2);
      if (cost < g[nxt]) {
        g[nxt] = cost;
        parent[nxt] = static_cast<int>(cur);
        open.emplace(cost + heuristic(rr, cc), rr, cc);
      }
    }
  }

  const std::size_t goal_idx = idx(goal.row, goal.col);
  if (g[goal_idx] >= kInf) {
    throw UnreachableError("plan_global: goal unreachable on the inflated map");
  }
  std::vector<GridCell> path;
  for (int cur = static_cast<int>(goal_idx); cur != -1; cur = parent[cur]) {
    path.push_back(GridCell{cur / map.cols, cur % map.cols});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<GridCell> plan_global(const WorldMap& map, GridCell start, GridCell goal,
                                  double inflation_radius) {
  return plan_on_occupancy(map, inflate_occupancy(map, inflation_radius), start, goal);
}

}  // namespace envsynth::sim
