#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "envsynth/extract/extraction.hpp"
#include "envsynth/gan/gan.hpp"
#include "envsynth/sim/evaluate.hpp"

namespace envsynth::pipeline {

// Exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::filesystem::path workspace = ".";
  std::filesystem::path maps_dir;     // default workspace/maps
  std::filesystem::path traces_dir;   // default workspace/traces
  std::filesystem::path envs_dir;     // default workspace/envs
  std::filesystem::path models_dir;   // default workspace/models
  std::filesystem::path reports_dir;  // default workspace/reports
  double map_resolution = 0.1;

  extract::ExtractionConfig extraction;
  gan::GanTrainConfig gan;
  int cluster_k = 100;
  int cluster_m = 20;
  int cluster_n = 5;

  std::string method = "gan";  // gan | pca | rs
  int synth_count = 100;       // M
  std::uint64_t master_seed = 0;

  int deployments_per_map = 10;
  sim::SimLimits limits;
  sim::PlannerParams deploy_params;

  int eval_trials = 20;
  double success_floor = 0.5;
  std::vector<sim::PlannerParams> candidates;

  void validate() const;  // throws ConfigError
};

PipelineConfig default_config();

// Flat key=value file, '#' comments. Unknown keys are errors. Candidate
// planner parameter sets are semicolon-separated 5-tuples:
//   evaluate.candidates = v_max,w_max,samples,inflation,reverse;...
PipelineConfig parse_config_file(const std::filesystem::path& path);
PipelineConfig parse_config_text(const std::string& text);

// Canonical sorted key=value dump; the stage cache hashes this.
std::string canonical_config_string(const PipelineConfig& cfg);

// Stable per-stage seed derivation from the master seed.
std::uint64_t stage_seed(std::uint64_t master_seed, std::uint64_t stage_id);

}  // namespace envsynth::pipeline
