#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "envsynth/core/types.hpp"

namespace envsynth::sim {

// Deployment map of arbitrary size. Same cell conventions as
// OccupancyGrid: row 0 is the bottom edge, cells are row-major, and a world
// coordinate v maps to cell index ceil(v/res)-1 (boundary points belong to
// the lower cell).
struct WorldMap {
  int rows = 0;
  int cols = 0;
  double resolution = 0.1;  // meters per cell
  std::vector<std::uint8_t> cells;

  bool in_bounds(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
  std::uint8_t at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
  void set(int r, int c, std::uint8_t v) { cells[static_cast<std::size_t>(r) * cols + c] = v; }
  double width_meters() const { return cols * resolution; }
  double height_meters() const { return rows * resolution; }
};

WorldMap world_from_grid(const OccupancyGrid& grid);

// P2 PGM, value > 0 means occupied, bottom row last in the file. Resolution
// comes from the caller (the config carries it for a maps directory).
WorldMap load_world_pgm(const std::filesystem::path& path, double resolution);
void save_world_pgm(const WorldMap& map, const std::filesystem::path& path);

int coord_to_cell(double v, double resolution);
double cell_center(int index, double resolution);

// Cells within `radius` meters (center-to-center) of an occupied cell are
// marked occupied. radius below the resolution leaves the map unchanged.
std::vector<std::uint8_t> inflate_occupancy(const WorldMap& map, double radius);

// 4-connected free-cell reachability (breadth-first). An occupied start or
// goal yields false, not an error.
bool is_navigable(const WorldMap& map, GridCell start, GridCell goal);
bool is_navigable(const OccupancyGrid& grid);

// First-hit range along a ray, exact grid traversal. Returns max_range when
// nothing is hit; a hit range is the boundary distance plus a small inset so
// the endpoint falls inside the occupied cell.
double raycast(const WorldMap& map, double x, double y, double angle, double max_range);

// Full sweep: beam b points at pose.theta + 2*pi*b/beam_count.
std::vector<double> simulate_scan(const WorldMap& map, const Pose& pose, int beam_count,
                                  double max_range);

// Meters from each free cell center to the nearest occupied cell, computed
// over an inflated occupancy vector; occupied cells get 0. Used by the local
// controller for clearance scoring.
std::vector<double> clearance_field(const WorldMap& map,
                                    const std::vector<std::uint8_t>& occupancy);

}  // namespace envsynth::sim
