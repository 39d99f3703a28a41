#pragma once

#include <string>
#include <vector>

#include "envsynth/sim/simulator.hpp"

namespace envsynth::sim {

struct EnvMetrics {
  std::string id;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_time = 0.0;  // over successful trials; 0 when none succeeded
  double std_time = 0.0;   // sample standard deviation over successful trials
};

struct EvalReport {
  std::vector<EnvMetrics> per_env;
  int total_trials = 0;
  int total_successes = 0;
  double success_rate = 0.0;
  double mean_time = 0.0;  // over all successful trials, the paper's metric
};

// Runs `trials` episodes per environment with per-episode rng streams
// derived from (master seed, global episode index). Every grid must be
// navigable; violations throw std::invalid_argument naming the entry.
EvalReport evaluate(const EnvironmentSet& envs, const PlannerParams& params, int trials,
                    const SimLimits& limits, std::uint64_t master_seed);

}  // namespace envsynth::sim
