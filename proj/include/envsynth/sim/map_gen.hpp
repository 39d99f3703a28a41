#pragma once

#include <cstdint>

#include "envsynth/sim/world.hpp"

namespace envsynth::sim {

// Procedural deployment map: bordered floor plan with interior walls,
// doorway gaps, and scattered box obstacles. Retries sub-seeds until the
// largest free component covers at least half of the free area, so sampled
// start-goal pairs are usually connected.
WorldMap generate_world(int rows, int cols, double resolution, std::uint64_t seed);

}  // namespace envsynth::sim
