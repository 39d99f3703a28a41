#include "envsynth/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace envsynth::sim {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::collision: return "collision";
    case Outcome::timeout: return "timeout";
  }
  return "timeout";
}

bool EpisodeContext::occupied_at(double x, double y) const {
  const int r = coord_to_cell(y, map->resolution);
  const int c = coord_to_cell(x, map->resolution);
  if (!map->in_bounds(r, c)) return true;  // leaving the map counts as a hit
  return inflated[static_cast<std::size_t>(r) * map->cols + c] != 0;
}

EpisodeContext make_episode_context(const WorldMap& map, GridCell start, GridCell goal,
                                    const PlannerParams& params, const SimLimits& limits) {
  params.validate();
  EpisodeContext ctx;
  ctx.map = &map;
  ctx.limits = limits;
  ctx.inflated = inflate_occupancy(map, params.inflation_radius);
  ctx.path = plan_on_occupancy(map, ctx.inflated, start, goal);
  ctx.waypoint_x.reserve(ctx.path.size());
  ctx.waypoint_y.reserve(ctx.path.size());
  ctx.cum_arclen.reserve(ctx.path.size());
  double arc = 0.0;
  for (std::size_t i = 0; i < ctx.path.size(); ++i) {
    ctx.waypoint_x.push_back(cell_center(ctx.path[i].col, map.resolution));
    ctx.waypoint_y.push_back(cell_center(ctx.path[i].row, map.resolution));
    if (i > 0) {
      arc += std::hypot(ctx.waypoint_x[i] - ctx.waypoint_x[i - 1],
                        ctx.waypoint_y[i] - ctx.waypoint_y[i - 1]);
    }
    ctx.cum_arclen.push_back(arc);
  }
  ctx.goal.x = cell_center(goal.col, map.resolution);
  ctx.goal.y = cell_center(goal.row, map.resolution);
  ctx.goal.theta = 0.0;
  return ctx;
}

namespace {

constexpr double kHorizonSeconds = 1.0;
constexpr double kLinearAccel = 2.0;    // m/s^2 reachable-window bound
constexpr double kAngularAccel = 6.0;   // rad/s^2
constexpr double kClearanceCap = 0.5;   // meters
constexpr double kProgressWeight = 2.0;
constexpr double kDeviationWeight = 0.5;
constexpr double kClearanceWeight = 0.6;
constexpr double kSpeedWeight = 0.3;

struct PathProjection {
  std::size_t index = 0;
  double score = 0.0;  // arc length minus a lateral-deviation penalty
  double deviation = 0.0;
};

// Nearest waypoint within a window around the tracked progress index; the
// window keeps the projection local so path segments that loop back close
// to the robot do not capture it.
PathProjection project_onto_path(const EpisodeContext& ctx, double x, double y,
                                 std::size_t anchor) {
  const double res = ctx.map->resolution;
  const std::size_t behind = static_cast<std::size_t>(std::ceil(1.0 / res));
  const std::size_t ahead = static_cast<std::size_t>(std::ceil(3.0 / res));
  const std::size_t lo = anchor > behind ? anchor - behind : 0;
  const std::size_t hi = std::min(ctx.path.size() - 1, anchor + ahead);
  PathProjection best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i <= hi; ++i) {
    const double d = std::hypot(x - ctx.waypoint_x[i], y - ctx.waypoint_y[i]);
    if (d < best_d) {
      best_d = d;
      best.index = i;
    }
  }
  best.deviation = best_d;
  best.score = ctx.cum_arclen[best.index] - kDeviationWeight * best_d;
  return best;
}

struct Rollout {
  bool collided = false;
  double end_x = 0.0;
  double end_y = 0.0;
};

Rollout roll_forward(const EpisodeContext& ctx, const Pose& pose, double v, double w,
                     double dt) {
  Rollout r;
  double x = pose.x, y = pose.y, th = pose.theta;
  const int steps = static_cast<int>(std::round(kHorizonSeconds / dt));
  const int sub = 2;  // collision checks per integration step
  for (int k = 0; k < steps; ++k) {
    for (int s = 0; s < sub; ++s) {
      const double h = dt / sub;
      x += v * std::cos(th) * h;
      y += v * std::sin(th) * h;
      th += w * h;
      if (ctx.occupied_at(x, y)) {
        r.collided = true;
        return r;
      }
    }
  }
  r.end_x = x;
  r.end_y = y;
  return r;
}

double scan_clearance(const std::vector<double>& scan, const Pose& pose, double max_range,
                      double px, double py) {
  // Distance from a candidate endpoint to the closest lidar hit.
  double best = kClearanceCap;
  const int beams = static_cast<int>(scan.size());
  for (int b = 0; b < beams; ++b) {
    if (scan[b] >= max_range) continue;  // no hit on this beam
    const double ang = pose.theta + 2.0 * M_PI * b / beams;
    const double hx = pose.x + scan[b] * std::cos(ang);
    const double hy = pose.y + scan[b] * std::sin(ang);
    best = std::min(best, std::hypot(px - hx, py - hy));
  }
  return best;
}

}  // namespace

ControlCommand step_controller(const RobotState& state, const PlannerParams& params,
                               const EpisodeContext& ctx, const std::vector<double>& scan,
                               SeededRng& rng) {
  const double dt = ctx.limits.timestep;
  const double v_min = 0.05 * params.max_linear_velocity;
  const double v_lo =
      std::clamp(state.linear - kLinearAccel * dt, v_min, params.max_linear_velocity);
  const double v_hi =
      std::clamp(state.linear + kLinearAccel * dt, v_min, params.max_linear_velocity);
  const double w_lo = std::max(-params.max_angular_velocity, state.angular - kAngularAccel * dt);
  const double w_hi = std::min(params.max_angular_velocity, state.angular + kAngularAccel * dt);

  ControlCommand recovery;
  recovery.linear = params.recovery_reverse_velocity;
  recovery.angular = 0.0;
  recovery.recovery = true;

  if (ctx.path.empty() || ctx.occupied_at(state.pose.x, state.pose.y)) {
    return recovery;
  }

  std::vector<std::pair<double, double>> candidates;
  candidates.reserve(params.sample_count);
  // A few canonical maneuvers first, the rest uniform in the window.
  candidates.emplace_back(v_hi, std::clamp(0.0, w_lo, w_hi));
  if (params.sample_count > 1) candidates.emplace_back(v_lo, w_hi);
  if (params.sample_count > 2) candidates.emplace_back(v_lo, w_lo);
  while (static_cast<int>(candidates.size()) < params.sample_count) {
    const double v = v_lo + (v_hi - v_lo) * rng.next_double();
    const double w = w_lo + (w_hi - w_lo) * rng.next_double();
    candidates.emplace_back(v, w);
  }

  const PathProjection here =
      project_onto_path(ctx, state.pose.x, state.pose.y, ctx.progress_index);

  bool found = false;
  double best_score = -std::numeric_limits<double>::infinity();
  ControlCommand best;
  for (const auto& [v, w] : candidates) {
    const Rollout r = roll_forward(ctx, state.pose, v, w, dt);
    if (r.collided) continue;
    const PathProjection end = project_onto_path(ctx, r.end_x, r.end_y, here.index);
    const double clearance =
        scan_clearance(scan, state.pose, ctx.limits.lidar_max_range, r.end_x, r.end_y);
    const double score = kProgressWeight * (end.score - here.score) +
                         kClearanceWeight * clearance + kSpeedWeight * v;
    if (score > best_score) {
      best_score = score;
      best.linear = v;
      best.angular = w;
      best.recovery = false;
      found = true;
    }
  }
  return found ? best : recovery;
}

namespace {

GridCell cell_of(const WorldMap& map, double x, double y) {
  return GridCell{coord_to_cell(y, map.resolution), coord_to_cell(x, map.resolution)};
}

}  // namespace

EpisodeResult run_episode(const WorldMap& map, GridCell start, GridCell goal,
                          const PlannerParams& params, const SimLimits& limits,
                          SeededRng& rng) {
  if (!is_navigable(map, start, goal)) {
    throw std::invalid_argument("run_episode: task is not navigable");
  }

  EpisodeResult result;
  result.trajectory.beam_count = limits.beam_count;
  result.trajectory.max_range = limits.lidar_max_range;

  RobotState state;
  state.pose.x = cell_center(start.col, map.resolution);
  state.pose.y = cell_center(start.row, map.resolution);
  const double gx = cell_center(goal.col, map.resolution);
  const double gy = cell_center(goal.row, map.resolution);
  state.pose.theta = normalize_angle(std::atan2(gy - state.pose.y, gx - state.pose.x));

  EpisodeContext ctx;
  try {
    ctx = make_episode_context(map, start, goal, params, limits);
  } catch (const UnreachableError&) {
    // Navigable on the raw map but boxed in once inflated: run the episode
    // without a global path, so the controller falls back to recovery every
    // step (and the trace records the resulting suboptimal behavior).
    ctx.map = &map;
    ctx.limits = limits;
    ctx.inflated = inflate_occupancy(map, params.inflation_radius);
    ctx.goal.x = cell_center(goal.col, map.resolution);
    ctx.goal.y = cell_center(goal.row, map.resolution);
  }

  const double vmax = params.max_linear_velocity;
  int commands = 0;
  Outcome outcome = Outcome::timeout;
  for (int k = 0; k < limits.max_steps; ++k) {
    std::vector<double> scan =
        simulate_scan(map, state.pose, limits.beam_count, limits.lidar_max_range);
    const ControlCommand cmd = step_controller(state, params, ctx, scan, rng);

    StepRecord rec;
    rec.scan = std::move(scan);
    rec.pose = state.pose;
    rec.suboptimal = cmd.linear < 0.0 ? 1 : 0;
    result.suboptimal_total += rec.suboptimal;
    result.trajectory.steps.push_back(std::move(rec));

    // Unicycle integration; |v| clamped so a step never exceeds vmax*dt.
    const double v = std::clamp(cmd.linear, -vmax, vmax);
    const double w = std::clamp(cmd.angular, -params.max_angular_velocity,
                                params.max_angular_velocity);
    bool collided = false;
    const int sub = 4;
    for (int s = 0; s < sub && !collided; ++s) {
      const double h = limits.timestep / sub;
      state.pose.x += v * std::cos(state.pose.theta) * h;
      state.pose.y += v * std::sin(state.pose.theta) * h;
      state.pose.theta = normalize_angle(state.pose.theta + w * h);
      if (ctx.occupied_at(state.pose.x, state.pose.y)) collided = true;
    }
    state.linear = v;
    state.angular = w;
    ++commands;

    // Track monotone progress along the global path for the projection window.
    if (!ctx.path.empty()) {
      const PathProjection proj =
          project_onto_path(ctx, state.pose.x, state.pose.y, ctx.progress_index);
      ctx.progress_index = std::max(ctx.progress_index, proj.index);
    }

    if (collided) {
      outcome = Outcome::collision;
      break;
    }
    if (std::hypot(state.pose.x - ctx.goal.x, state.pose.y - ctx.goal.y) <=
        limits.goal_tolerance) {
      outcome = Outcome::success;
      break;
    }
  }

  if (outcome != Outcome::collision) {
    // Terminal observation; no command is issued from it.
    StepRecord rec;
    rec.scan = simulate_scan(map, state.pose, limits.beam_count, limits.lidar_max_range);
    rec.pose = state.pose;
    rec.suboptimal = 0;
    result.trajectory.steps.push_back(std::move(rec));
  }
  result.outcome = outcome;
  result.time_cost = commands * limits.timestep;
  return result;
}

NavigationTask task_from_grid(const OccupancyGrid& grid) {
  NavigationTask task;
  task.env = grid;
  const double res = OccupancyGrid::resolution();
  task.start.x = cell_center(OccupancyGrid::start_cell().col, res);
  task.start.y = cell_center(OccupancyGrid::start_cell().row, res);
  task.goal.x = cell_center(OccupancyGrid::goal_cell().col, res);
  task.goal.y = cell_center(OccupancyGrid::goal_cell().row, res);
  task.start.theta = normalize_angle(
      std::atan2(task.goal.y - task.start.y, task.goal.x - task.start.x));
  task.goal.theta = task.start.theta;
  return task;
}

EpisodeResult run_episode(const NavigationTask& task, const PlannerParams& params,
                          const SimLimits& limits, SeededRng& rng) {
  const WorldMap map = world_from_grid(task.env);
  const GridCell start = cell_of(map, task.start.x, task.start.y);
  const GridCell goal = cell_of(map, task.goal.x, task.goal.y);
  return run_episode(map, start, goal, params, limits, rng);
}

std::vector<Trajectory> deploy_batch(const std::vector<WorldMap>& maps,
                                     const std::vector<std::string>& map_ids,
                                     const PlannerParams& params, int deployments_per_map,
                                     const SimLimits& limits, std::uint64_t master_seed,
                                     double min_separation) {
  if (maps.empty()) {
    throw std::invalid_argument("deploy_batch: need at least one map");
  }
  if (map_ids.size() != maps.size()) {
    throw std::invalid_argument("deploy_batch: map_ids must match maps");
  }
  constexpr int kPairAttempts = 1000;
  SeededRng master(master_seed);
  std::vector<Trajectory> out;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const WorldMap& map = maps[m];
    for (int d = 0; d < deployments_per_map; ++d) {
      const std::uint64_t episode_index =
          static_cast<std::uint64_t>(m) * deployments_per_map + d;
      SeededRng rng = master.split(episode_index);
      bool found = false;
      GridCell start, goal;
      for (int attempt = 0; attempt < kPairAttempts && !found; ++attempt) {
        start = GridCell{static_cast<int>(rng.next_index(map.rows)),
                         static_cast<int>(rng.next_index(map.cols))};
        goal = GridCell{static_cast<int>(rng.next_index(map.rows)),
                        static_cast<int>(rng.next_index(map.cols))};
        if (map.at(start.row, start.col) || map.at(goal.row, goal.col)) continue;
        const double dist = std::hypot((start.row - goal.row) * map.resolution,
                                       (start.col - goal.col) * map.resolution);
        if (dist < min_separation) continue;
        if (!is_navigable(map, start, goal)) continue;
        found = true;
      }
      if (!found) {
        std::cerr << "deploy: no navigable start-goal pair with >= " << min_separation
                  << " m separation on map " << map_ids[m] << "; skipping it\n";
        break;  // remaining deployments on this map would fail the same way
      }
      EpisodeResult ep = run_episode(map, start, goal, params, limits, rng);
      ep.trajectory.deployment_id = map_ids[m] + "_dep" + std::to_string(d);
      ep.trajectory.map_id = map_ids[m];
      out.push_back(std::move(ep.trajectory));
    }
  }
  return out;
}

}  // namespace envsynth::sim
