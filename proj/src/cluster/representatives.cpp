#include "envsynth/cluster/representatives.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "envsynth/core/grid.hpp"
#include "envsynth/sim/world.hpp"

namespace envsynth::cluster {

using Eigen::MatrixXd;
using Eigen::VectorXd;

EnvironmentSet select_representatives(const EnvironmentSet& envs, const PcaModel& pca,
                                      int m, int n, SeededRng& rng) {
  if (envs.empty()) {
    throw std::invalid_argument("select_representatives: empty source set");
  }
  if (m < 1 || n < 1) {
    throw std::invalid_argument("select_representatives: m and n must be positive");
  }

  const MatrixXd points = pca_transform_all(pca, grids_as_matrix(envs));
  const KmeansResult clusters = kmeans(points, m, rng);

  std::vector<std::vector<int>> members(m);
  for (int i = 0; i < static_cast<int>(clusters.assignments.size()); ++i) {
    members[clusters.assignments[i]].push_back(i);
  }

  EnvironmentSet out;
  out.kind = SetKind::synthesized;
  for (int j = 0; j < m; ++j) {
    std::vector<int> chosen;
    if (static_cast<int>(members[j].size()) >= n) {
      // Without replacement: partial Fisher-Yates over the member list.
      std::vector<int> pool = members[j];
      for (int t = 0; t < n; ++t) {
        const std::size_t pick = t + rng.next_index(pool.size() - t);
        std::swap(pool[t], pool[pick]);
        chosen.push_back(pool[t]);
      }
    } else {
      for (int t = 0; t < n; ++t) {
        chosen.push_back(members[j][rng.next_index(members[j].size())]);
      }
    }
    for (int idx : chosen) {
      const VectorXd recon = pca_reconstruct(pca, points.row(idx).transpose());
      std::vector<std::uint8_t> flat(OccupancyGrid::kCellCount);
      for (int c = 0; c < OccupancyGrid::kCellCount; ++c) {
        flat[c] = recon[c] >= 0.5 ? 1 : 0;
      }
      OccupancyGrid grid = grid_from_flat(flat);
      if (!sim::is_navigable(grid)) {
        grid = envs.entries[idx].grid;  // degenerate reconstruction: keep the original
      }
      EnvEntry entry;
      entry.grid = std::move(grid);
      entry.source = "pca:cluster=" + std::to_string(j) + ",member=" + std::to_string(idx);
      out.entries.push_back(std::move(entry));
    }
  }
  return out;
}

}  // namespace envsynth::cluster
