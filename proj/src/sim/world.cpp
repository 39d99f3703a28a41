#include "envsynth/sim/world.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

#include "envsynth/core/grid_io.hpp"

namespace envsynth::sim {

WorldMap world_from_grid(const OccupancyGrid& grid) {
  WorldMap map;
  map.rows = OccupancyGrid::kSize;
  map.cols = OccupancyGrid::kSize;
  map.resolution = OccupancyGrid::resolution();
  map.cells.assign(grid.cells().begin(), grid.cells().end());
  return map;
}

WorldMap load_world_pgm(const std::filesystem::path& path, double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("map resolution must be positive");
  }
  const PgmImage img = read_pgm(path);
  WorldMap map;
  map.rows = img.height;
  map.cols = img.width;
  map.resolution = resolution;
  map.cells.resize(static_cast<std::size_t>(map.rows) * map.cols);
  for (int r = 0; r < map.rows; ++r) {
    const int file_row = map.rows - 1 - r;  // bottom row last
    for (int c = 0; c < map.cols; ++c) {
      map.set(r, c, img.values[static_cast<std::size_t>(file_row) * map.cols + c] > 0);
    }
  }
  return map;
}

void save_world_pgm(const WorldMap& map, const std::filesystem::path& path) {
  PgmImage img;
  img.width = map.cols;
  img.height = map.rows;
  img.maxval = 1;
  img.values.resize(static_cast<std::size_t>(map.rows) * map.cols);
  for (int r = 0; r < map.rows; ++r) {
    const int file_row = map.rows - 1 - r;
    for (int c = 0; c < map.cols; ++c) {
      img.values[static_cast<std::size_t>(file_row) * map.cols + c] = map.at(r, c);
    }
  }
  write_pgm(img, path);
}

int coord_to_cell(double v, double resolution) {
  const int c = static_cast<int>(std::ceil(v / resolution)) - 1;
  return c < 0 ? 0 : c;
}

double cell_center(int index, double resolution) {
  return (index + 0.5) * resolution;
}

std::vector<std::uint8_t> inflate_occupancy(const WorldMap& map, double radius) {
  std::vector<std::uint8_t> out = map.cells;
  const int reach = static_cast<int>(radius / map.resolution);
  if (reach < 1) return out;
  // Disk offsets by center-to-center distance.
  std::vector<std::pair<int, int>> offsets;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (std::hypot(dr * map.resolution, dc * map.resolution) <= radius) {
        offsets.emplace_back(dr, dc);
      }
    }
  }
  for (int r = 0; r < map.rows; ++r) {
    for (int c = 0; c < map.cols; ++c) {
      if (!map.at(r, c)) continue;
      for (const auto& [dr, dc] : offsets) {
        const int rr = r + dr;
        const int cc = c + dc;
        if (rr >= 0 && rr < map.rows && cc >= 0 && cc < map.cols) {
          out[static_cast<std::size_t>(rr) * map.cols + cc] = 1;
        }
      }
    }
  }
  return out;
}

bool is_navigable(const WorldMap& map, GridCell start, GridCell goal) {
  if (!map.in_bounds(start.row, start.col) || !map.in_bounds(goal.row, goal.col)) {
    throw std::invalid_argument("is_navigable: cell out of bounds");
  }
  if (map.at(start.row, start.col) || map.at(goal.row, goal.col)) return false;
  if (start == goal) return true;
  std::vector<std::uint8_t> seen(map.cells.size(), 0);
  std::deque<GridCell> frontier{start};
  seen[static_cast<std::size_t>(start.row) * map.cols + start.col] = 1;
  constexpr int dr[4] = {1, -1, 0, 0};
  constexpr int dc[4] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    const GridCell cur = frontier.front();
    frontier.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int r = cur.row + dr[k];
      const int c = cur.col + dc[k];
      if (r < 0 || r >= map.rows || c < 0 || c >= map.cols) continue;
      const std::size_t idx = static_cast<std::size_t>(r) * map.cols + c;
      if (seen[idx] || map.cells[idx]) continue;
      if (r == goal.row && c == goal.col) return true;
      seen[idx] = 1;
      frontier.push_back(GridCell{r, c});
    }
  }
  return false;
}

bool is_navigable(const OccupancyGrid& grid) {
  return is_navigable(world_from_grid(grid), OccupancyGrid::start_cell(),
                      OccupancyGrid::goal_cell());
}

double raycast(const WorldMap& map, double x, double y, double angle, double max_range) {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  int r = coord_to_cell(y, map.resolution);
  int c = coord_to_cell(x, map.resolution);
  if (!map.in_bounds(r, c)) return max_range;
  if (map.at(r, c)) return 0.0;

  // Amanatides-Woo traversal. Cell (r,c) spans (c*res,(c+1)*res] x
  // (r*res,(r+1)*res]; the step inset pushes the reported endpoint inside
  // the occupied cell so rasterization marks the obstacle, not its face.
  const double res = map.resolution;
  const int step_c = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_r = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  double t_max_x = inf, t_max_y = inf, t_delta_x = inf, t_delta_y = inf;
  if (step_c > 0) {
    t_max_x = ((c + 1) * res - x) / dx;
    t_delta_x = res / dx;
  } else if (step_c < 0) {
    t_max_x = (c * res - x) / dx;
    t_delta_x = -res / dx;
  }
  if (step_r > 0) {
    t_max_y = ((r + 1) * res - y) / dy;
    t_delta_y = res / dy;
  } else if (step_r < 0) {
    t_max_y = (r * res - y) / dy;
    t_delta_y = -res / dy;
  }

  const double inset = 0.05 * res;
  double t = 0.0;
  while (t <= max_range) {
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      c += step_c;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      r += step_r;
    }
    if (!map.in_bounds(r, c)) return max_range;
    if (t > max_range) return max_range;
    if (map.at(r, c)) {
      return std::min(t + inset, max_range);
    }
  }
  return max_range;
}

std::vector<double> simulate_scan(const WorldMap& map, const Pose& pose, int beam_count,
                                  double max_range) {
  std::vector<double> scan(beam_count);
  for (int b = 0; b < beam_count; ++b) {
    const double angle = pose.theta + 2.0 * M_PI * b / beam_count;
    scan[b] = raycast(map, pose.x, pose.y, angle, max_range);
  }
  return scan;
}

std::vector<double> clearance_field(const WorldMap& map,
                                    const std::vector<std::uint8_t>& occupancy) {
  // Multi-source BFS gives 4-connected hop counts; good enough for scoring.
  const std::size_t n = occupancy.size();
  std::vector<int> hops(n, -1);
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (occupancy[i]) {
      hops[i] = 0;
      frontier.push_back(i);
    }
  }
  constexpr int dr[4] = {1, -1, 0, 0};
  constexpr int dc[4] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop_front();
    const int r = static_cast<int>(cur / map.cols);
    const int c = static_cast<int>(cur % map.cols);
    for (int k = 0; k < 4; ++k) {
      const int rr = r + dr[k];
      const int cc = c + dc[k];
      if (rr < 0 || rr >= map.rows || cc < 0 || cc >= map.cols) continue;
      const std::size_t idx = static_cast<std::size_t>(rr) * map.cols + cc;
      if (hops[idx] >= 0) continue;
      hops[idx] = hops[cur] + 1;
      frontier.push_back(idx);
    }
  }
  std::vector<double> meters(n);
  const double far = (map.rows + map.cols) * map.resolution;
  for (std::size_t i = 0; i < n; ++i) {
    meters[i] = hops[i] < 0 ? far : hops[i] * map.resolution;
  }
  return meters;
}

}  // namespace envsynth::sim
