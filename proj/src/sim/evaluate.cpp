#include "envsynth/sim/evaluate.hpp"

#include <cmath>
#include <stdexcept>

namespace envsynth::sim {

EvalReport evaluate(const EnvironmentSet& envs, const PlannerParams& params, int trials,
                    const SimLimits& limits, std::uint64_t master_seed) {
  if (trials < 1) {
    throw std::invalid_argument("evaluate: trials must be at least 1");
  }
  for (std::size_t i = 0; i < envs.entries.size(); ++i) {
    if (!is_navigable(envs.entries[i].grid)) {
      throw std::invalid_argument("evaluate: environment " + std::to_string(i) +
                                  " is not navigable");
    }
  }

  SeededRng master(master_seed);
  EvalReport report;
  double total_success_time = 0.0;
  for (std::size_t i = 0; i < envs.entries.size(); ++i) {
    const NavigationTask task = task_from_grid(envs.entries[i].grid);
    EnvMetrics metrics;
    metrics.id = "env_" + std::to_string(i);
    metrics.trials = trials;
    std::vector<double> times;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t episode_index = i * static_cast<std::uint64_t>(trials) + t;
      SeededRng rng = master.split(episode_index);
      const EpisodeResult ep = run_episode(task, params, limits, rng);
      if (ep.outcome == Outcome::success) {
        ++metrics.successes;
        times.push_back(ep.time_cost);
      }
    }
    metrics.success_rate = static_cast<double>(metrics.successes) / trials;
    if (!times.empty()) {
      double sum = 0.0;
      for (double t : times) sum += t;
      metrics.mean_time = sum / times.size();
      if (times.size() > 1) {
        double sq = 0.0;
        for (double t : times) sq += (t - metrics.mean_time) * (t - metrics.mean_time);
        metrics.std_time = std::sqrt(sq / (times.size() - 1));
      }
      total_success_time += sum;
    }
    report.total_trials += metrics.trials;
    report.total_successes += metrics.successes;
    report.per_env.push_back(std::move(metrics));
  }
  report.success_rate = report.total_trials > 0
                            ? static_cast<double>(report.total_successes) /
                                  report.total_trials
                            : 0.0;
  report.mean_time =
      report.total_successes > 0 ? total_success_time / report.total_successes : 0.0;
  return report;
}

}  // namespace envsynth::sim
