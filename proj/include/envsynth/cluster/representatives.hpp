#pragma once

#include "envsynth/cluster/kmeans.hpp"
#include "envsynth/cluster/pca.hpp"
#include "envsynth/core/types.hpp"

namespace envsynth::cluster {

// Clusters the challenging set in PCA space into m clusters, samples n
// members per cluster (without replacement when the cluster is large
// enough), reconstructs each through the PCA model, and binarizes at 0.5.
// A reconstruction that is not navigable falls back to the member's
// original grid. Returns exactly m*n environments.
EnvironmentSet select_representatives(const EnvironmentSet& envs, const PcaModel& pca,
                                      int m, int n, SeededRng& rng);

}  // namespace envsynth::cluster
