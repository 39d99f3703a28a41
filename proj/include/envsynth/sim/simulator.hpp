#pragma once

#include <string>
#include <vector>

#include "envsynth/core/rng.hpp"
#include "envsynth/core/types.hpp"
#include "envsynth/sim/planner.hpp"
#include "envsynth/sim/world.hpp"

namespace envsynth::sim {

struct SimLimits {
  int max_steps = 1000;          // command budget per episode
  double timestep = 0.1;         // seconds
  double goal_tolerance = 0.3;   // meters
  int beam_count = 360;
  double lidar_max_range = 10.0;
};

enum class Outcome { success, collision, timeout };

std::string to_string(Outcome o);

struct EpisodeResult {
  Trajectory trajectory;
  Outcome outcome = Outcome::timeout;
  double time_cost = 0.0;         // commands * timestep
  long long suboptimal_total = 0; // steps with a negative linear command
};

struct RobotState {
  Pose pose;
  double linear = 0.0;
  double angular = 0.0;
};

struct ControlCommand {
  double linear = 0.0;
  double angular = 0.0;
  bool recovery = false;  // true iff the command reverses (suboptimal flag)
};

// Pre-computed per-episode data shared by every control step.
struct EpisodeContext {
  const WorldMap* map = nullptr;
  std::vector<std::uint8_t> inflated;
  std::vector<GridCell> path;
  std::vector<double> waypoint_x;   // world coordinates of path cell centers
  std::vector<double> waypoint_y;
  std::vector<double> cum_arclen;   // cumulative path length at each waypoint
  std::size_t progress_index = 0;   // monotone nearest-waypoint tracker
  Pose goal;
  SimLimits limits;

  bool occupied_at(double x, double y) const;
};

EpisodeContext make_episode_context(const WorldMap& map, GridCell start, GridCell goal,
                                    const PlannerParams& params, const SimLimits& limits);

// Samples velocity candidates inside the reachable window, rolls each out on
// the inflated map, and picks the best collision-free one by progress along
// the waypoints, clearance against the scan hits, and speed. When every
// candidate collides the command reverses at recovery_reverse_velocity with
// the suboptimal flag set. Deterministic given the rng state.
ControlCommand step_controller(const RobotState& state, const PlannerParams& params,
                               const EpisodeContext& ctx, const std::vector<double>& scan,
                               SeededRng& rng);

// Closed-loop episode at fixed timestep: simulate lidar, run the controller,
// integrate unicycle kinematics, record one StepRecord per command.
// Terminates on goal tolerance, collision against the inflated map, or the
// step budget. Requires a raw-navigable start/goal pair.
EpisodeResult run_episode(const WorldMap& map, GridCell start, GridCell goal,
                          const PlannerParams& params, const SimLimits& limits,
                          SeededRng& rng);
EpisodeResult run_episode(const NavigationTask& task, const PlannerParams& params,
                          const SimLimits& limits, SeededRng& rng);

NavigationTask task_from_grid(const OccupancyGrid& grid);

// For each map, samples navigable start-goal cell pairs at least
// min_separation apart and runs one episode per deployment. Episode rng
// streams derive from (master_seed, global episode index) so results do not
// depend on scheduling. Maps without a valid pair after the retry cap are
// skipped with a diagnostic on stderr.
std::vector<Trajectory> deploy_batch(const std::vector<WorldMap>& maps,
                                     const std::vector<std::string>& map_ids,
                                     const PlannerParams& params, int deployments_per_map,
                                     const SimLimits& limits, std::uint64_t master_seed,
                                     double min_separation = 5.0);

}  // namespace envsynth::sim
