#include "envsynth/sim/map_gen.hpp"

#include <deque>

#include "envsynth/core/rng.hpp"

namespace envsynth::sim {

namespace {

std::size_t largest_free_component(const WorldMap& map) {
  std::vector<std::uint8_t> seen(map.cells.size(), 0);
  std::size_t best = 0;
  constexpr int dr[4] = {1, -1, 0, 0};
  constexpr int dc[4] = {0, 0, 1, -1};
  for (int r = 0; r < map.rows; ++r) {
    for (int c = 0; c < map.cols; ++c) {
      const std::size_t start = static_cast<std::size_t>(r) * map.cols + c;
      if (map.cells[start] || seen[start]) continue;
      std::size_t size = 0;
      std::deque<std::pair<int, int>> frontier{{r, c}};
      seen[start] = 1;
      while (!frontier.empty()) {
        const auto [cr, cc] = frontier.front();
        frontier.pop_front();
        ++size;
        for (int k = 0; k < 4; ++k) {
          const int rr = cr + dr[k];
          const int ncc = cc + dc[k];
          if (rr < 0 || rr >= map.rows || ncc < 0 || ncc >= map.cols) continue;
          const std::size_t idx = static_cast<std::size_t>(rr) * map.cols + ncc;
          if (map.cells[idx] || seen[idx]) continue;
          seen[idx] = 1;
          frontier.emplace_back(rr, ncc);
        }
      }
      best = std::max(best, size);
    }
  }
  return best;
}

WorldMap generate_once(int rows, int cols, double resolution, SeededRng& rng) {
  WorldMap map;
  map.rows = rows;
  map.cols = cols;
  map.resolution = resolution;
  map.cells.assign(static_cast<std::size_t>(rows) * cols, 0);

  for (int r = 0; r < rows; ++r) {
    map.set(r, 0, 1);
    map.set(r, cols - 1, 1);
  }
  for (int c = 0; c < cols; ++c) {
    map.set(0, c, 1);
    map.set(rows - 1, c, 1);
  }

  // Interior walls with doorway gaps.
  const int walls = 2 + static_cast<int>(rng.next_index(3));
  const int door = std::max(4, static_cast<int>(0.5 / resolution));  // ~0.5 m openings
  for (int w = 0; w < walls; ++w) {
    const bool horizontal = rng.next_index(2) == 0;
    if (horizontal) {
      const int r = 3 + static_cast<int>(rng.next_index(std::max(1, rows - 6)));
      const int gap_at = 1 + static_cast<int>(rng.next_index(std::max(1, cols - 2 - door)));
      for (int c = 1; c < cols - 1; ++c) {
        if (c >= gap_at && c < gap_at + door) continue;
        map.set(r, c, 1);
      }
    } else {
      const int c = 3 + static_cast<int>(rng.next_index(std::max(1, cols - 6)));
      const int gap_at = 1 + static_cast<int>(rng.next_index(std::max(1, rows - 2 - door)));
      for (int r = 1; r < rows - 1; ++r) {
        if (r >= gap_at && r < gap_at + door) continue;
        map.set(r, c, 1);
      }
    }
  }

  // Scattered box obstacles (furniture).
  const int area = rows * cols;
  const int boxes = area / 400;
  for (int b = 0; b < boxes; ++b) {
    const int h = 2 + static_cast<int>(rng.next_index(4));
    const int wdt = 2 + static_cast<int>(rng.next_index(4));
    const int r0 = 2 + static_cast<int>(rng.next_index(std::max(1, rows - h - 4)));
    const int c0 = 2 + static_cast<int>(rng.next_index(std::max(1, cols - wdt - 4)));
    for (int r = r0; r < r0 + h; ++r) {
      for (int c = c0; c < c0 + wdt; ++c) {
        map.set(r, c, 1);
      }
    }
  }
  return map;
}

}  // namespace

WorldMap generate_world(int rows, int cols, double resolution, std::uint64_t seed) {
  if (rows < 10 || cols < 10) {
    throw std::invalid_argument("generate_world: map must be at least 10x10 cells");
  }
  SeededRng root(seed);
  WorldMap map;
  for (int attempt = 0; attempt < 20; ++attempt) {
    SeededRng rng = root.split(attempt);
    map = generate_once(rows, cols, resolution, rng);
    std::size_t free_cells = 0;
    for (auto c : map.cells) free_cells += c == 0;
    if (free_cells > 0 && largest_free_component(map) * 2 >= free_cells) {
      return map;
    }
  }
  return map;  // last attempt; deploy skips unreachable pairs anyway
}

}  // namespace envsynth::sim
