#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "envsynth/core/types.hpp"

namespace envsynth {

// Plain (P2) portable graymap payload. Rows are listed top-down in the file;
// since row 0 of our grids is the bottom edge, writers emit row rows-1 first
// and row 0 last.
struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 1;
  std::vector<int> values;  // file order: top row first
};

PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const PgmImage& img, const std::filesystem::path& path);

// Scenario grid <-> P2 PGM (30x30, maxval 1, value 1 = occupied, bottom row
// last in the file).
void save_grid_pgm(const OccupancyGrid& grid, const std::filesystem::path& path);
OccupancyGrid load_grid_pgm(const std::filesystem::path& path);

// One-line format: 900 characters of '0'/'1', row-major starting at the
// bottom row (same order as grid_to_bitvector).
std::string grid_to_line(const OccupancyGrid& grid);
OccupancyGrid grid_from_line(const std::string& line);

// Environment set directory layout:
//   set.json                  {"kind": ..., "count": N}
//   manifest.csv              id,suboptimal_total,source,initial_index,final_index
//   env_00000.pgm/.txt ...    one PGM and one line-format file per entry
void save_environment_set(const EnvironmentSet& set, const std::filesystem::path& dir);
EnvironmentSet load_environment_set(const std::filesystem::path& dir);

}  // namespace envsynth
