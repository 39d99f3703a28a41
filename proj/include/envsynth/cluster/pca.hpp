#pragma once

#include <Eigen/Core>
#include <filesystem>

#include "envsynth/core/types.hpp"

namespace envsynth::cluster {

// Principal axes of a centered dataset. components is k x dim with
// orthonormal rows; explained_variance is sorted non-increasing. Sign
// convention: each component's largest-magnitude entry is positive.
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;
  Eigen::VectorXd explained_variance;

  int dim() const { return static_cast<int>(mean.size()); }
  int k() const { return static_cast<int>(components.rows()); }
};

// Fits via singular-value decomposition of the centered data matrix
// (row-per-sample). Requires >= 2 rows and 1 <= k <= min(rows-1, dim).
PcaModel pca_fit(const Eigen::MatrixXd& data, int k);

// transform: components * (v - mean); reconstruct: components^T * c + mean.
// reconstruct(transform(v)) is the orthogonal projection of v onto the
// component span.
Eigen::VectorXd pca_transform(const PcaModel& model, const Eigen::VectorXd& v);
Eigen::VectorXd pca_reconstruct(const PcaModel& model, const Eigen::VectorXd& coords);
Eigen::MatrixXd pca_transform_all(const PcaModel& model, const Eigen::MatrixXd& data);

// Row-per-grid {0,1} matrix for PCA/K-means input.
Eigen::MatrixXd grids_as_matrix(const EnvironmentSet& envs);

// Versioned checkpoint (magic line, JSON header, float64 blob).
void save_pca(const PcaModel& model, const std::filesystem::path& path);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace envsynth::cluster
