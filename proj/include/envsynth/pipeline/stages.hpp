#pragma once

#include <optional>
#include <string>

#include "envsynth/pipeline/config.hpp"
#include "envsynth/pipeline/similarity.hpp"

namespace envsynth::pipeline {

// One CLI process per workspace; the lock file is removed on destruction.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const std::filesystem::path& workspace);
  ~WorkspaceLock();
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  std::filesystem::path path_;
};

// Stage entry points. Each writes its artifacts plus a manifest carrying the
// content hash of (inputs, relevant config, master seed); run_all skips a
// stage whose manifest hash already matches unless force is set.
void cmd_gen_maps(const PipelineConfig& cfg, int count, int rows, int cols);
void cmd_deploy(const PipelineConfig& cfg);
void cmd_extract(const PipelineConfig& cfg);
void cmd_synthesize(const PipelineConfig& cfg);
void cmd_evaluate(const PipelineConfig& cfg, const std::string& set_id = "synthesized");
void cmd_report(const PipelineConfig& cfg);
void cmd_run_all(const PipelineConfig& cfg, bool force);

// Non-binding comparison: pick the best candidate on the synthesized set and
// on a same-size random subset of the raw set, then score both selections on
// held-out challenging environments. Writes reports/directional.json, which
// cmd_report folds into the bundle when present.
struct DirectionalResult {
  double synthesized_selected_success = 0.0;
  double raw_selected_success = 0.0;
  double synthesized_selected_time = 0.0;
  double raw_selected_time = 0.0;
  int held_out_count = 0;
};
DirectionalResult directional_sanity(const PipelineConfig& cfg);

// Exposed for tests: 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& data);

}  // namespace envsynth::pipeline
