#include "envsynth/extract/extraction.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace envsynth::extract {

std::vector<Scenario> segment_trajectory(const Trajectory& traj,
                                         const ExtractionConfig& cfg) {
  std::vector<Scenario> scenarios;
  if (traj.steps.empty()) return scenarios;

  std::size_t initial = 0;
  for (std::size_t k = 1; k < traj.steps.size(); ++k) {
    if (euclidean(traj.steps[k].pose, traj.steps[initial].pose) > cfg.segment_length) {
      Scenario s;
      s.initial_index = initial;
      s.final_index = k;
      s.steps.assign(traj.steps.begin() + initial, traj.steps.begin() + k + 1);
      s.beam_count = traj.beam_count;
      s.sensor_max_range = traj.max_range;
      s.suboptimal_total = aggregate_suboptimal(s);
      scenarios.push_back(std::move(s));
      initial = k;  // closing step opens the next scenario
    }
  }
  return scenarios;
}

long long aggregate_suboptimal(const Scenario& scenario) {
  if (scenario.steps.empty()) {
    throw std::invalid_argument("aggregate_suboptimal: empty scenario");
  }
  long long total = 0;
  for (const auto& step : scenario.steps) total += step.suboptimal;
  return total;
}

int coordinate_to_cell(double v, double resolution) {
  const int c = static_cast<int>(std::ceil(v / resolution)) - 1;
  return c < 0 ? 0 : c;
}

ScenarioFrame scenario_frame(const Scenario& scenario) {
  if (scenario.steps.empty()) {
    throw std::invalid_argument("scenario_frame: empty scenario");
  }
  const Pose& start = scenario.steps.front().pose;
  const Pose& goal = scenario.steps.back().pose;
  const double dx = goal.x - start.x;
  const double dy = goal.y - start.y;
  const double len = std::hypot(dx, dy);
  if (len < 1e-12) {
    throw std::invalid_argument("scenario_frame: start and goal coincide");
  }
  // The rotation [uy -ux; ux uy] maps the unit start->goal direction to +y.
  ScenarioFrame frame;
  frame.ux = dx / len;
  frame.uy = dy / len;
  frame.start_x = start.x;
  frame.start_y = start.y;
  return frame;
}

OccupancyGrid rasterize_scenario(const Scenario& scenario, const ExtractionConfig& cfg) {
  const ScenarioFrame frame = scenario_frame(scenario);
  const double extent = OccupancyGrid::kExtentMeters;
  const double res = OccupancyGrid::resolution();
  const double no_hit = std::min(cfg.max_range, scenario.sensor_max_range > 0.0
                                                    ? scenario.sensor_max_range
                                                    : cfg.max_range);

  OccupancyGrid grid;
  for (const auto& step : scenario.steps) {
    const int beams = static_cast<int>(step.scan.size());
    for (int b = 0; b < beams; ++b) {
      const double r = step.scan[b];
      if (r >= no_hit) continue;  // max-range reading: nothing was hit
      const double angle = step.pose.theta + 2.0 * M_PI * b / beams;
      const auto [sx, sy] = frame.to_frame(step.pose.x + r * std::cos(angle),
                                           step.pose.y + r * std::sin(angle));
      if (sx < 0.0 || sx > extent || sy < 0.0 || sy > extent) continue;
      grid.set(coordinate_to_cell(sy, res), coordinate_to_cell(sx, res), 1);
    }
  }
  return grid_from_flat(grid_to_bitvector(grid));  // forces start/goal free
}

EnvironmentSet filter_challenging(const EnvironmentSet& envs, const ExtractionConfig& cfg) {
  EnvironmentSet out;
  out.kind = SetKind::challenging;
  for (const auto& e : envs.entries) {
    if (e.suboptimal_total > cfg.difficulty_threshold) {
      out.entries.push_back(e);
    }
  }
  return out;
}

ExtractionResult extract_domain(const std::vector<Trajectory>& trajs,
                                const ExtractionConfig& cfg) {
  if (trajs.empty()) {
    throw std::invalid_argument("extract_domain: need at least one trajectory");
  }
  ExtractionResult result;
  result.raw.kind = SetKind::raw;
  for (const auto& traj : trajs) {
    for (const auto& scenario : segment_trajectory(traj, cfg)) {
      EnvEntry entry;
      try {
        entry.grid = rasterize_scenario(scenario, cfg);
      } catch (const std::exception& e) {
        ++result.scenarios_skipped;
        std::cerr << "extract: skipping scenario [" << scenario.initial_index << ", "
                  << scenario.final_index << "] of " << traj.deployment_id << ": "
                  << e.what() << "\n";
        continue;
      }
      entry.suboptimal_total = scenario.suboptimal_total;
      entry.source = traj.deployment_id;
      entry.initial_index = static_cast<long long>(scenario.initial_index);
      entry.final_index = static_cast<long long>(scenario.final_index);
      result.raw.entries.push_back(std::move(entry));
    }
  }
  result.challenging = filter_challenging(result.raw, cfg);
  return result;
}

}  // namespace envsynth::extract
