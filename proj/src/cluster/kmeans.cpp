#include "envsynth/cluster/kmeans.hpp"

#include <limits>
#include <stdexcept>

namespace envsynth::cluster {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double sq_dist(const MatrixXd& points, int i, const MatrixXd& centroids, int j) {
  return (points.row(i) - centroids.row(j)).squaredNorm();
}

MatrixXd kmeanspp_init(const MatrixXd& points, int m, SeededRng& rng) {
  const int n = static_cast<int>(points.rows());
  MatrixXd centroids(m, points.cols());
  centroids.row(0) = points.row(static_cast<int>(rng.next_index(n)));
  VectorXd d2(n);
  for (int i = 0; i < n; ++i) {
    d2[i] = (points.row(i) - centroids.row(0)).squaredNorm();
  }
  for (int j = 1; j < m; ++j) {
    const double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.next_index(n));  // all points already covered
    } else {
      const double target = rng.next_double() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(j) = points.row(pick);
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.row(i) - centroids.row(j)).squaredNorm());
    }
  }
  return centroids;
}

}  // namespace

KmeansResult kmeans(const MatrixXd& points, int m, SeededRng& rng, int max_iters) {
  const int n = static_cast<int>(points.rows());
  if (m < 1 || m > n) {
    throw std::invalid_argument("kmeans: need 1 <= m <= point count");
  }

  KmeansResult result;
  result.centroids = kmeanspp_init(points, m, rng);
  result.assignments.assign(n, -1);
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment step; ties go to the lower cluster index.
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points, i, result.centroids, 0);
      for (int j = 1; j < m; ++j) {
        const double d = sq_dist(points, i, result.centroids, j);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (result.assignments[i] != best) {
        result.assignments[i] = best;
        changed = true;
      }
    }

    // Repair empty clusters: the farthest member of the largest cluster
    // becomes the empty cluster's sole point (inertia strictly decreases).
    std::vector<int> counts(m, 0);
    for (int a : result.assignments) ++counts[a];
    for (int j = 0; j < m; ++j) {
      if (counts[j] > 0) continue;
      int largest = 0;
      for (int l = 1; l < m; ++l) {
        if (counts[l] > counts[largest]) largest = l;
      }
      int steal = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (result.assignments[i] != largest) continue;
        const double d = sq_dist(points, i, result.centroids, largest);
        if (d > far_d) {
          far_d = d;
          steal = i;
        }
      }
      result.assignments[steal] = j;
      result.centroids.row(j) = points.row(steal);
      --counts[largest];
      ++counts[j];
      changed = true;
    }

    // Update step.
    MatrixXd sums = MatrixXd::Zero(m, points.cols());
    std::vector<int> sizes(m, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(result.assignments[i]) += points.row(i);
      ++sizes[result.assignments[i]];
    }
    for (int j = 0; j < m; ++j) {
      result.centroids.row(j) = sums.row(j) / sizes[j];
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      inertia += sq_dist(points, i, result.centroids, result.assignments[i]);
    }
    if (inertia > prev_inertia + 1e-9 * (1.0 + prev_inertia)) {
      throw std::logic_error("kmeans: inertia increased across a Lloyd iteration");
    }
    prev_inertia = inertia;
    result.inertia = inertia;
    if (!changed) break;
  }
  return result;
}

}  // namespace envsynth::cluster
