#pragma once

#include <stdexcept>
#include <vector>

#include "envsynth/sim/world.hpp"

namespace envsynth::sim {

// Knobs of the classical planner the deployments and evaluations run with.
struct PlannerParams {
  double max_linear_velocity = 0.5;    // m/s
  double max_angular_velocity = 1.5;   // rad/s
  int sample_count = 12;               // velocity rollouts per control step
  double inflation_radius = 0.08;      // meters
  double recovery_reverse_velocity = -0.2;  // m/s, must be negative

  void validate() const;
};

struct UnreachableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest 8-connected path (unit/sqrt(2) step costs) over the inflated
// occupancy, A* with a Euclidean heuristic. Expansion ties break on smaller
// row, then column. Returns start..goal inclusive; throws UnreachableError
// when no path exists on the inflated map.
std::vector<GridCell> plan_global(const WorldMap& map, GridCell start, GridCell goal,
                                  double inflation_radius);

// Same search on a caller-provided occupancy vector (used by episodes that
// already inflated the map).
std::vector<GridCell> plan_on_occupancy(const WorldMap& map,
                                        const std::vector<std::uint8_t>& occupancy,
                                        GridCell start, GridCell goal);

}  // namespace envsynth::sim
