#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace envsynth {

struct GridCell {
  int row = 0;
  int col = 0;
  bool operator==(const GridCell&) const = default;
};

// One scenario environment: a 30x30 binary occupancy matrix over a
// 5m x 5m footprint. Row 0 is the bottom edge (start side), row 29 the top
// edge (goal side); cells are stored row-major. The start cell sits at the
// middle of the bottom edge and the goal cell at the middle of the top edge,
// and both are always free.
class OccupancyGrid {
 public:
  static constexpr int kSize = 30;
  static constexpr int kCellCount = kSize * kSize;
  static constexpr double kExtentMeters = 5.0;

  static constexpr GridCell start_cell() { return GridCell{0, kSize / 2}; }
  static constexpr GridCell goal_cell() { return GridCell{kSize - 1, kSize / 2}; }
  static constexpr double resolution() { return kExtentMeters / kSize; }

  OccupancyGrid() { cells_.fill(0); }

  std::uint8_t at(int row, int col) const { return cells_[row * kSize + col]; }
  void set(int row, int col, std::uint8_t v) { cells_[row * kSize + col] = v; }

  const std::array<std::uint8_t, kCellCount>& cells() const { return cells_; }

  int occupied_count() const;

  bool operator==(const OccupancyGrid&) const = default;

 private:
  friend OccupancyGrid grid_from_flat(const std::vector<std::uint8_t>& flat);
  std::array<std::uint8_t, kCellCount> cells_;
};

// Builds a grid from a 30x30 matrix of {0,1}. The start and goal cells are
// forced free (sensor returns near the robot origin would otherwise
// invalidate real scenarios). Throws std::invalid_argument on wrong
// dimensions or non-binary values.
OccupancyGrid grid_from_cells(const std::vector<std::vector<std::uint8_t>>& cells);

// Same contract, row-major 900-element input.
OccupancyGrid grid_from_flat(const std::vector<std::uint8_t>& flat);

// Row-major flattening: element row*30+col equals cells[row][col].
// Inverse of grid_from_cells modulo the forced-free start/goal cells.
std::vector<std::uint8_t> grid_to_bitvector(const OccupancyGrid& grid);

// Fraction of occupied cells, in [0, 1].
double occupancy_density(const OccupancyGrid& grid);

// Number of differing cells between two grids, in [0, 900].
int hamming_distance(const OccupancyGrid& a, const OccupancyGrid& b);

}  // namespace envsynth
