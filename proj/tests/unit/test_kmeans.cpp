#include <algorithm>
#include <limits>
#include <vector>

#include "doctest.h"
#include "envsynth/cluster/kmeans.hpp"

using namespace envsynth;
using namespace envsynth::cluster;
using Eigen::MatrixXd;

namespace {

// Exhaustive optimum over all assignments of the points into at most m
// labeled clusters (empty clusters allowed in the enumeration; they simply
// waste labels). Feasible for <= 8 points, m <= 3.
double exhaustive_optimum(const MatrixXd& points, int m) {
  const int n = static_cast<int>(points.rows());
  std::vector<int> assign(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double inertia = 0.0;
    for (int j = 0; j < m; ++j) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(points.cols());
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (assign[i] == j) {
          mean += points.row(i);
          ++count;
        }
      }
      if (count == 0) continue;
      mean /= count;
      for (int i = 0; i < n; ++i) {
        if (assign[i] == j) inertia += (points.row(i) - mean).squaredNorm();
      }
    }
    best = std::min(best, inertia);
    int k = n - 1;
    while (k >= 0 && assign[k] == m - 1) {
      assign[k] = 0;
      --k;
    }
    if (k < 0) break;
    ++assign[k];
  }
  return best;
}

double best_of_seeds(const MatrixXd& points, int m, int seeds) {
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < seeds; ++s) {
    SeededRng rng(1000 + s);
    best = std::min(best, kmeans(points, m, rng).inertia);
  }
  return best;
}

}  // namespace

TEST_CASE("two well-separated pairs split cleanly") {
  MatrixXd points(4, 2);
  points << 0, 0, 0, 1, 10, 0, 10, 1;
  SeededRng rng(4);
  const KmeansResult r = kmeans(points, 2, rng);
  CHECK(r.assignments[0] == r.assignments[1]);
  CHECK(r.assignments[2] == r.assignments[3]);
  CHECK(r.assignments[0] != r.assignments[2]);
  CHECK(r.inertia == doctest::Approx(1.0));  // 4 * 0.5^2
  // Centroids are (0, 0.5) and (10, 0.5) in some order.
  std::vector<double> xs{r.centroids(0, 0), r.centroids(1, 0)};
  std::sort(xs.begin(), xs.end());
  CHECK(xs[0] == doctest::Approx(0.0));
  CHECK(xs[1] == doctest::Approx(10.0));
  CHECK(r.centroids(0, 1) == doctest::Approx(0.5));
  CHECK(r.centroids(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("one cluster reduces to the coordinate-wise mean") {
  SeededRng data_rng(31);
  MatrixXd points(7, 3);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 3; ++j) points(i, j) = data_rng.next_normal();
  }
  SeededRng rng(5);
  const KmeansResult r = kmeans(points, 1, rng);
  const Eigen::RowVectorXd mean = points.colwise().mean();
  CHECK((r.centroids.row(0) - mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("as many clusters as points gives zero inertia") {
  MatrixXd points(5, 2);
  points << 0, 0, 1, 0, 2, 0, 3, 0, 4, 0;
  SeededRng rng(6);
  const KmeansResult r = kmeans(points, 5, rng);
  CHECK(r.inertia == doctest::Approx(0.0));
}

TEST_CASE("m greater than the point count is rejected") {
  MatrixXd points(2, 2);
  points << 0, 0, 1, 1;
  SeededRng rng(7);
  CHECK_THROWS_AS(kmeans(points, 3, rng), std::invalid_argument);
}

TEST_CASE("identical seeds give identical clusterings") {
  SeededRng data_rng(41);
  MatrixXd points(30, 4);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 4; ++j) points(i, j) = data_rng.next_normal();
  }
  SeededRng r1(9), r2(9);
  const KmeansResult a = kmeans(points, 4, r1);
  const KmeansResult b = kmeans(points, 4, r2);
  CHECK(a.assignments == b.assignments);
  CHECK((a.centroids - b.centroids).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("best-of-10-seeds matches the exhaustive optimum on small instances") {
  SeededRng data_rng(55);
  for (int instance = 0; instance < 6; ++instance) {
    const int n = 5 + static_cast<int>(data_rng.next_index(4));  // 5..8 points
    const int m = 2 + static_cast<int>(data_rng.next_index(2));  // 2..3 clusters
    MatrixXd points(n, 2);
    for (int i = 0; i < n; ++i) {
      points(i, 0) = 10.0 * data_rng.next_double();
      points(i, 1) = 10.0 * data_rng.next_double();
    }
    const double optimal = exhaustive_optimum(points, m);
    const double found = best_of_seeds(points, m, 10);
    CAPTURE(instance);
    CHECK(found <= optimal + 1e-9);
    CHECK(found >= optimal - 1e-9);
  }
}

TEST_CASE("duplicate points with m equal to count are repaired into singletons") {
  MatrixXd points(4, 2);
  points << 1, 1, 1, 1, 2, 2, 2, 2;
  SeededRng rng(10);
  const KmeansResult r = kmeans(points, 4, rng);
  CHECK(r.inertia == doctest::Approx(0.0));
  std::vector<int> counts(4, 0);
  for (int a : r.assignments) ++counts[a];
  for (int c : counts) CHECK(c == 1);
}
