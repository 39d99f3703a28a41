#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "envsynth/core/rng.hpp"
#include "envsynth/core/types.hpp"

namespace testutil {

using namespace envsynth;

// Trajectory with the given poses and all-clear scans (every reading at
// max_range, so rasterization sees no hits).
inline Trajectory trajectory_from_poses(const std::vector<Pose>& poses,
                                        int beam_count = 4, double max_range = 10.0) {
  Trajectory traj;
  traj.deployment_id = "test";
  traj.map_id = "test_map";
  traj.beam_count = beam_count;
  traj.max_range = max_range;
  for (const auto& p : poses) {
    StepRecord s;
    s.scan.assign(beam_count, max_range);
    s.pose = p;
    s.suboptimal = 0;
    traj.steps.push_back(std::move(s));
  }
  return traj;
}

// Straight line along +x from x0, one pose every `spacing` meters.
inline std::vector<Pose> straight_line(double x0, double x1, double spacing) {
  std::vector<Pose> poses;
  for (double x = x0; x <= x1 + 1e-9; x += spacing) {
    poses.push_back(Pose{x, 0.0, 0.0});
  }
  return poses;
}

// Wall grid helpers for the bimodal toy dataset: columns [col0, col1) fully
// occupied.
inline OccupancyGrid wall_grid(int col0, int col1) {
  std::vector<std::uint8_t> flat(OccupancyGrid::kCellCount, 0);
  for (int r = 0; r < OccupancyGrid::kSize; ++r) {
    for (int c = col0; c < col1; ++c) {
      flat[r * OccupancyGrid::kSize + c] = 1;
    }
  }
  return grid_from_flat(flat);
}

inline EnvironmentSet bimodal_wall_set(int copies_per_mode = 32) {
  EnvironmentSet set;
  set.kind = SetKind::challenging;
  const OccupancyGrid left = wall_grid(0, 3);
  const OccupancyGrid right = wall_grid(27, 30);
  for (int i = 0; i < copies_per_mode; ++i) {
    set.entries.push_back(EnvEntry{left, 60, "left", -1, -1});
    set.entries.push_back(EnvEntry{right, 60, "right", -1, -1});
  }
  return set;
}

inline OccupancyGrid random_grid(SeededRng& rng, double density = 0.2) {
  std::vector<std::uint8_t> flat(OccupancyGrid::kCellCount);
  for (auto& c : flat) c = rng.next_double() < density ? 1 : 0;
  return grid_from_flat(flat);
}

// Unique scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("envsynth_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
