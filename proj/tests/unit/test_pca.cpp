#include <cmath>

#include "doctest.h"
#include "envsynth/cluster/pca.hpp"
#include "testutil.hpp"

using namespace envsynth;
using namespace envsynth::cluster;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_data(int n, int dim, SeededRng& rng) {
  MatrixXd m(n, dim);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < dim; ++c) m(r, c) = rng.next_normal();
  }
  return m;
}

}  // namespace

TEST_CASE("k = count-1 reconstructs every training vector") {
  SeededRng rng(21);
  const MatrixXd data = random_data(10, 900, rng);
  const PcaModel model = pca_fit(data, 9);
  for (int i = 0; i < 10; ++i) {
    const VectorXd v = data.row(i);
    const VectorXd rec = pca_reconstruct(model, pca_transform(model, v));
    CHECK((rec - v).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("collinear data is fully explained by one component") {
  SeededRng rng(22);
  VectorXd direction = VectorXd::Zero(900);
  for (int i = 0; i < 900; ++i) direction[i] = rng.next_normal();
  direction.normalize();
  MatrixXd data(20, 900);
  for (int i = 0; i < 20; ++i) {
    data.row(i) = (3.0 * rng.next_normal()) * direction.transpose();
  }
  const PcaModel model = pca_fit(data, 1);
  // Total variance equals the leading explained variance.
  const MatrixXd centered = data.rowwise() - data.colwise().mean();
  const double total = centered.array().square().sum() / (20 - 1);
  CHECK(model.explained_variance[0] >= (1.0 - 1e-10) * total);
}

TEST_CASE("transform of the mean is zero and double projection is exact") {
  SeededRng rng(23);
  const MatrixXd data = random_data(12, 50, rng);
  const PcaModel model = pca_fit(data, 5);
  const VectorXd at_mean = pca_transform(model, model.mean);
  CHECK(at_mean.cwiseAbs().maxCoeff() < 1e-10);

  VectorXd coords(5);
  for (int i = 0; i < 5; ++i) coords[i] = rng.next_normal();
  const VectorXd back = pca_transform(model, pca_reconstruct(model, coords));
  CHECK((back - coords).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("components are row-orthonormal with non-increasing variance") {
  SeededRng rng(24);
  const MatrixXd data = random_data(40, 120, rng);
  const PcaModel model = pca_fit(data, 10);
  const MatrixXd gram = model.components * model.components.transpose();
  CHECK((gram - MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-8);
  for (int i = 1; i < 10; ++i) {
    CHECK(model.explained_variance[i] <= model.explained_variance[i - 1] + 1e-12);
  }
  // Sign convention.
  for (int i = 0; i < 10; ++i) {
    int arg = 0;
    model.components.row(i).cwiseAbs().maxCoeff(&arg);
    CHECK(model.components(i, arg) > 0.0);
  }
}

TEST_CASE("reconstruction error is non-increasing in k") {
  SeededRng rng(25);
  EnvironmentSet set;
  set.kind = SetKind::challenging;
  for (int i = 0; i < 50; ++i) {
    set.entries.push_back(EnvEntry{testutil::random_grid(rng), 60, "r", -1, -1});
  }
  const MatrixXd data = grids_as_matrix(set);
  double prev = 1e18;
  for (int k : {1, 5, 10, 20, 40}) {
    const PcaModel model = pca_fit(data, k);
    double mse = 0.0;
    for (int i = 0; i < data.rows(); ++i) {
      const VectorXd v = data.row(i);
      const VectorXd rec = pca_reconstruct(model, pca_transform(model, v));
      mse += (rec - v).squaredNorm();
    }
    mse /= data.rows();
    CHECK(mse <= prev + 1e-9);
    prev = mse;
  }
}

TEST_CASE("contract violations throw") {
  SeededRng rng(26);
  const MatrixXd data = random_data(5, 30, rng);
  CHECK_THROWS_AS(pca_fit(data, 5), std::invalid_argument);   // k > count-1
  CHECK_THROWS_AS(pca_fit(data.topRows(1), 1), std::invalid_argument);
  const PcaModel model = pca_fit(data, 3);
  CHECK_THROWS_AS(pca_transform(model, VectorXd::Zero(29)), std::invalid_argument);
  CHECK_THROWS_AS(pca_reconstruct(model, VectorXd::Zero(4)), std::invalid_argument);
}

TEST_CASE("checkpoint round-trips") {
  SeededRng rng(27);
  const MatrixXd data = random_data(15, 64, rng);
  const PcaModel model = pca_fit(data, 6);
  const auto dir = testutil::scratch_dir("pca_ckpt");
  save_pca(model, dir / "pca.ckpt");
  const PcaModel loaded = load_pca(dir / "pca.ckpt");
  CHECK((loaded.mean - model.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.components - model.components).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.explained_variance - model.explained_variance).cwiseAbs().maxCoeff() ==
        0.0);
}
