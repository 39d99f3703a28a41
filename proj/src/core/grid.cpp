#include "envsynth/core/grid.hpp"

#include <stdexcept>
#include <string>

namespace envsynth {

int OccupancyGrid::occupied_count() const {
  int n = 0;
  for (auto c : cells_) n += c;
  return n;
}

namespace {

void force_endpoints_free(OccupancyGrid& g) {
  const auto s = OccupancyGrid::start_cell();
  const auto t = OccupancyGrid::goal_cell();
  g.set(s.row, s.col, 0);
  g.set(t.row, t.col, 0);
}

}  // namespace

OccupancyGrid grid_from_cells(const std::vector<std::vector<std::uint8_t>>& cells) {
  if (cells.size() != OccupancyGrid::kSize) {
    throw std::invalid_argument("grid dimension error: expected 30 rows, got " +
                                std::to_string(cells.size()));
  }
  std::vector<std::uint8_t> flat;
  flat.reserve(OccupancyGrid::kCellCount);
  for (const auto& row : cells) {
    if (row.size() != OccupancyGrid::kSize) {
      throw std::invalid_argument("grid dimension error: expected 30 columns, got " +
                                  std::to_string(row.size()));
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return grid_from_flat(flat);
}

OccupancyGrid grid_from_flat(const std::vector<std::uint8_t>& flat) {
  if (flat.size() != OccupancyGrid::kCellCount) {
    throw std::invalid_argument("grid dimension error: expected 900 cells, got " +
                                std::to_string(flat.size()));
  }
  OccupancyGrid g;
  for (int i = 0; i < OccupancyGrid::kCellCount; ++i) {
    if (flat[i] > 1) {
      throw std::invalid_argument("grid value error: cells must be 0 or 1, got " +
                                  std::to_string(int(flat[i])) + " at index " +
                                  std::to_string(i));
    }
    g.cells_[i] = flat[i];
  }
  force_endpoints_free(g);
  return g;
}

std::vector<std::uint8_t> grid_to_bitvector(const OccupancyGrid& grid) {
  return std::vector<std::uint8_t>(grid.cells().begin(), grid.cells().end());
}

double occupancy_density(const OccupancyGrid& grid) {
  return static_cast<double>(grid.occupied_count()) / OccupancyGrid::kCellCount;
}

int hamming_distance(const OccupancyGrid& a, const OccupancyGrid& b) {
  int d = 0;
  for (int i = 0; i < OccupancyGrid::kCellCount; ++i) {
    d += a.cells()[i] != b.cells()[i];
  }
  return d;
}

}  // namespace envsynth
