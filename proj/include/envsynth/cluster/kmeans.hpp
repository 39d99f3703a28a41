#pragma once

#include <Eigen/Core>
#include <vector>

#include "envsynth/core/rng.hpp"

namespace envsynth::cluster {

struct KmeansResult {
  Eigen::MatrixXd centroids;     // m x dim
  std::vector<int> assignments;  // per point, in [0, m)
  double inertia = 0.0;          // total within-cluster squared distance
};

// Lloyd's algorithm with k-means++ seeding, run to an assignment fixpoint or
// max_iters. Assignment ties break toward the lower cluster index; empty
// clusters are repaired by stealing the farthest point from the largest
// cluster. Inertia is checked non-increasing every iteration. Deterministic
// given the rng state.
KmeansResult kmeans(const Eigen::MatrixXd& points, int m, SeededRng& rng,
                    int max_iters = 300);

}  // namespace envsynth::cluster
