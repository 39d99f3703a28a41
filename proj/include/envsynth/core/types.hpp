#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "envsynth/core/grid.hpp"

namespace envsynth {

// Heading-normalized 2D pose in the world frame. theta lies in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Maps any finite angle into (-pi, pi].
double normalize_angle(double theta);

// Planar Euclidean distance between two poses; heading is ignored.
double euclidean(const Pose& a, const Pose& b);

// One deployment step: a full lidar sweep, the pose it was taken from, and
// the suboptimality indicator (1 iff the commanded linear velocity at this
// step was negative, i.e. the planner fell back to a reverse recovery).
struct StepRecord {
  std::vector<double> scan;  // ranges in meters, clamped to [0, max_range]
  Pose pose;
  int suboptimal = 0;
};

// A full deployment trace (K commands -> K+1 step records).
struct Trajectory {
  std::vector<StepRecord> steps;
  std::string deployment_id;
  std::string map_id;
  int beam_count = 0;       // beams per scan, fixed across the trace
  double max_range = 0.0;   // lidar clamp used when the trace was recorded
};

// Validates the trajectory invariants (non-empty, fixed beam count, sane
// consecutive pose spacing). Throws std::invalid_argument on violation.
void validate_trajectory(const Trajectory& traj);

// A segmented sub-trajectory: all steps from the initial step up to the
// first step more than segment_length away from it (inclusive).
struct Scenario {
  std::vector<StepRecord> steps;
  std::size_t initial_index = 0;  // index of the first step in the source trajectory
  std::size_t final_index = 0;    // index of the last step in the source trajectory
  long long suboptimal_total = 0;
  int beam_count = 0;
  double sensor_max_range = 0.0;
};

struct NavigationTask {
  OccupancyGrid env;
  Pose start;
  Pose goal;
};

enum class SetKind { raw, challenging, synthesized };

std::string to_string(SetKind kind);
SetKind set_kind_from_string(const std::string& s);

// One environment with its difficulty count and provenance. Extracted
// entries carry the source trajectory id and step indices; synthesized
// entries carry a method tag in `source` and -1 indices.
struct EnvEntry {
  OccupancyGrid grid;
  long long suboptimal_total = 0;
  std::string source;
  long long initial_index = -1;
  long long final_index = -1;
};

struct EnvironmentSet {
  SetKind kind = SetKind::raw;
  std::vector<EnvEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

}  // namespace envsynth
