#include "envsynth/synth/random_sampling.hpp"

#include <stdexcept>
#include <string>

namespace envsynth::synth {

EnvironmentSet sample_uniform(const EnvironmentSet& envs, int count, SeededRng& rng) {
  if (count < 0) {
    throw std::invalid_argument("sample_uniform: count must be non-negative");
  }
  EnvironmentSet out;
  out.kind = SetKind::synthesized;
  if (count == 0) return out;
  if (envs.empty()) {
    throw std::invalid_argument("sample_uniform: cannot draw from an empty set");
  }
  out.entries.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::size_t pick = rng.next_index(envs.entries.size());
    EnvEntry entry;
    entry.grid = envs.entries[pick].grid;
    entry.suboptimal_total = envs.entries[pick].suboptimal_total;
    entry.source = "rs:index=" + std::to_string(pick);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace envsynth::synth
