#pragma once

#include "envsynth/core/rng.hpp"
#include "envsynth/core/types.hpp"

namespace envsynth::synth {

// Baseline synthesis: count independent uniform draws with replacement from
// the source set. Provenance records the drawn source index.
EnvironmentSet sample_uniform(const EnvironmentSet& envs, int count, SeededRng& rng);

}  // namespace envsynth::synth
