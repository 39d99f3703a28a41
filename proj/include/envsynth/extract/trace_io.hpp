#pragma once

#include <filesystem>
#include <vector>

#include "envsynth/core/types.hpp"

namespace envsynth::extract {

// JSONL trace format. First line is a header object:
//   {"type":"header","deployment_id":...,"map_id":...,"beam_count":N,"max_range":R}
// followed by one step object per line:
//   {"scan":[...],"x":...,"y":...,"theta":...,"suboptimal":0|1}
// Ranges above max_range are clamped on read; negative or non-finite values
// are rejected. Parse errors carry the 1-based line number.
void write_trace(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trace(const std::filesystem::path& path);

// All *.jsonl files in the directory, sorted by filename.
std::vector<Trajectory> read_traces_dir(const std::filesystem::path& dir);

}  // namespace envsynth::extract
