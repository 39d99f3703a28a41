#pragma once

#include <array>
#include <filesystem>

#include "envsynth/core/types.hpp"

namespace envsynth::pipeline {

// Quantifies how well a synthesized set represents its reference set:
// nearest-neighbor Hamming distances from every synthesized grid into the
// reference set, plus occupancy-density histograms (16 bins over [0,1]) of
// both sets and their L1 distance.
struct SimilarityReport {
  std::size_t synthesized_count = 0;
  std::size_t reference_count = 0;
  double hamming_mean = 0.0;
  double hamming_median = 0.0;
  double hamming_max = 0.0;
  std::array<double, 16> synthesized_density_hist{};
  std::array<double, 16> reference_density_hist{};
  double histogram_l1 = 0.0;
};

SimilarityReport compute_similarity(const EnvironmentSet& synthesized,
                                    const EnvironmentSet& reference);

void save_similarity(const SimilarityReport& report, const std::filesystem::path& path);
SimilarityReport load_similarity(const std::filesystem::path& path);

}  // namespace envsynth::pipeline
