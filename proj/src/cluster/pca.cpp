#include "envsynth/cluster/pca.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace envsynth::cluster {

using Eigen::MatrixXd;
using Eigen::VectorXd;

PcaModel pca_fit(const MatrixXd& data, int k) {
  const int n = static_cast<int>(data.rows());
  const int dim = static_cast<int>(data.cols());
  if (n < 2) {
    throw std::invalid_argument("pca_fit: need at least 2 vectors");
  }
  if (k < 1 || k > std::min(n - 1, dim)) {
    throw std::invalid_argument("pca_fit: k must lie in [1, min(count-1, dim)]");
  }

  PcaModel model;
  model.mean = data.colwise().mean();
  MatrixXd centered = data.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(k).transpose();
  model.explained_variance =
      svd.singularValues().head(k).array().square() / (n - 1);

  // Sign convention: largest-magnitude entry of each component positive.
  for (int i = 0; i < k; ++i) {
    int arg = 0;
    model.components.row(i).cwiseAbs().maxCoeff(&arg);
    if (model.components(i, arg) < 0.0) {
      model.components.row(i) = -model.components.row(i);
    }
  }
  return model;
}

VectorXd pca_transform(const PcaModel& model, const VectorXd& v) {
  if (v.size() != model.mean.size()) {
    throw std::invalid_argument("pca_transform: vector dimension mismatch");
  }
  return model.components * (v - model.mean);
}

VectorXd pca_reconstruct(const PcaModel& model, const VectorXd& coords) {
  if (coords.size() != model.components.rows()) {
    throw std::invalid_argument("pca_reconstruct: coordinate dimension mismatch");
  }
  return model.components.transpose() * coords + model.mean;
}

MatrixXd pca_transform_all(const PcaModel& model, const MatrixXd& data) {
  if (data.cols() != model.mean.size()) {
    throw std::invalid_argument("pca_transform_all: dimension mismatch");
  }
  return (data.rowwise() - model.mean.transpose()) * model.components.transpose();
}

MatrixXd grids_as_matrix(const EnvironmentSet& envs) {
  MatrixXd data(envs.entries.size(), OccupancyGrid::kCellCount);
  for (std::size_t i = 0; i < envs.entries.size(); ++i) {
    const auto& cells = envs.entries[i].grid.cells();
    for (int j = 0; j < OccupancyGrid::kCellCount; ++j) {
      data(static_cast<Eigen::Index>(i), j) = cells[j];
    }
  }
  return data;
}

namespace {
constexpr const char* kPcaMagic = "ENVSYNTH-PCA v1";
}

void save_pca(const PcaModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  }
  nlohmann::json header;
  header["dim"] = model.dim();
  header["k"] = model.k();
  out << kPcaMagic << "\n" << header.dump() << "\n";
  auto write_vec = [&out](const VectorXd& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  write_vec(model.mean);
  for (int r = 0; r < model.components.rows(); ++r) {
    const VectorXd row = model.components.row(r);
    write_vec(row);
  }
  write_vec(model.explained_variance);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

PcaModel load_pca(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint: " + path.string());
  }
  std::string magic, header_line;
  std::getline(in, magic);
  if (magic != kPcaMagic) {
    throw std::runtime_error("not a pca checkpoint (bad magic): " + path.string());
  }
  std::getline(in, header_line);
  const nlohmann::json header = nlohmann::json::parse(header_line);
  const int dim = header.at("dim").get<int>();
  const int k = header.at("k").get<int>();
  PcaModel model;
  auto read_vec = [&in, &path](VectorXd& v, int n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + path.string());
  };
  read_vec(model.mean, dim);
  model.components.resize(k, dim);
  for (int r = 0; r < k; ++r) {
    VectorXd row;
    read_vec(row, dim);
    model.components.row(r) = row;
  }
  read_vec(model.explained_variance, k);
  return model;
}

}  // namespace envsynth::cluster
