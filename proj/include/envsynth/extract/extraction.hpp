#pragma once

#include <utility>
#include <vector>

#include "envsynth/core/types.hpp"

namespace envsynth::extract {

struct ExtractionConfig {
  double segment_length = 5.0;       // meters between a scenario's endpoints
  long long difficulty_threshold = 50;  // keep environments with c-bar strictly above
  double max_range = 10.0;           // readings at or beyond this are no-hits
};

// Scans the trajectory in order; a scenario closes at the first step whose
// Euclidean distance from the scenario's initial step exceeds
// segment_length, and that closing step becomes the next scenario's initial
// step. A trailing partial segment is discarded. Empty output is valid.
std::vector<Scenario> segment_trajectory(const Trajectory& traj,
                                         const ExtractionConfig& cfg);

// Sum of per-step suboptimal flags, boundary steps included.
// Throws std::invalid_argument on an empty scenario.
long long aggregate_suboptimal(const Scenario& scenario);

// Reconstructs the scenario as a re-oriented occupancy grid:
//  1. the rotation mapping the unit start->goal vector onto +y is applied to
//     every lidar endpoint about the start position,
//  2. endpoints are translated so the start lands at (extent/2, 0),
//  3. cells containing at least one endpoint inside [0,extent]^2 are marked
//     occupied (unknown space stays free), and
//  4. start/goal cells are forced free.
// Readings at or beyond max_range are treated as no-hits. Throws
// std::invalid_argument when start and goal coincide.
OccupancyGrid rasterize_scenario(const Scenario& scenario, const ExtractionConfig& cfg);

// Keeps exactly the entries with suboptimal_total strictly greater than the
// difficulty threshold, preserving order.
EnvironmentSet filter_challenging(const EnvironmentSet& envs, const ExtractionConfig& cfg);

struct ExtractionResult {
  EnvironmentSet raw;
  EnvironmentSet challenging;
  std::size_t scenarios_skipped = 0;  // rasterization failures, logged and dropped
};

// Full pipeline over a batch of trajectories, in input order.
ExtractionResult extract_domain(const std::vector<Trajectory>& trajs,
                                const ExtractionConfig& cfg);

// Maps a scenario-frame coordinate to a cell index: boundary points belong
// to the lower cell, so the closed interval [0, extent] maps onto rows and
// columns 0..29. Exposed for the geometry tests.
int coordinate_to_cell(double v, double resolution);

// Rigid world -> scenario-frame transform: rotate about the start position
// so the start->goal direction becomes +y, then translate the start to
// (extent/2, 0).
struct ScenarioFrame {
  double ux = 0.0;  // unit start->goal direction
  double uy = 1.0;
  double start_x = 0.0;
  double start_y = 0.0;

  std::pair<double, double> to_frame(double wx, double wy) const {
    const double px = wx - start_x;
    const double py = wy - start_y;
    return {uy * px - ux * py + OccupancyGrid::kExtentMeters / 2.0, ux * px + uy * py};
  }
};

// Throws std::invalid_argument when the scenario's start and goal coincide.
ScenarioFrame scenario_frame(const Scenario& scenario);

}  // namespace envsynth::extract
