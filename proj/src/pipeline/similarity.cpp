#include "envsynth/pipeline/similarity.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace envsynth::pipeline {

namespace {

std::array<double, 16> density_histogram(const EnvironmentSet& set) {
  std::array<double, 16> hist{};
  if (set.empty()) return hist;
  for (const auto& e : set.entries) {
    const double d = occupancy_density(e.grid);
    const int bin = std::min(15, static_cast<int>(d * 16.0));
    hist[bin] += 1.0;
  }
  for (auto& h : hist) h /= static_cast<double>(set.entries.size());
  return hist;
}

}  // namespace

SimilarityReport compute_similarity(const EnvironmentSet& synthesized,
                                    const EnvironmentSet& reference) {
  SimilarityReport report;
  report.synthesized_count = synthesized.entries.size();
  report.reference_count = reference.entries.size();
  report.synthesized_density_hist = density_histogram(synthesized);
  report.reference_density_hist = density_histogram(reference);
  for (int b = 0; b < 16; ++b) {
    report.histogram_l1 += std::abs(report.synthesized_density_hist[b] -
                                    report.reference_density_hist[b]);
  }
  if (synthesized.empty() || reference.empty()) return report;

  std::vector<double> nn;
  nn.reserve(synthesized.entries.size());
  for (const auto& s : synthesized.entries) {
    int best = OccupancyGrid::kCellCount + 1;
    for (const auto& r : reference.entries) {
      best = std::min(best, hamming_distance(s.grid, r.grid));
      if (best == 0) break;
    }
    nn.push_back(best);
  }
  std::sort(nn.begin(), nn.end());
  double sum = 0.0;
  for (double d : nn) sum += d;
  report.hamming_mean = sum / nn.size();
  report.hamming_max = nn.back();
  const std::size_t mid = nn.size() / 2;
  report.hamming_median =
      nn.size() % 2 == 1 ? nn[mid] : 0.5 * (nn[mid - 1] + nn[mid]);
  return report;
}

void save_similarity(const SimilarityReport& report, const std::filesystem::path& path) {
  nlohmann::json j;
  j["synthesized_count"] = report.synthesized_count;
  j["reference_count"] = report.reference_count;
  j["hamming_mean"] = report.hamming_mean;
  j["hamming_median"] = report.hamming_median;
  j["hamming_max"] = report.hamming_max;
  j["synthesized_density_hist"] = report.synthesized_density_hist;
  j["reference_density_hist"] = report.reference_density_hist;
  j["histogram_l1"] = report.histogram_l1;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write similarity report: " + path.string());
  }
  out << j.dump(2) << "\n";
}

SimilarityReport load_similarity(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open similarity report: " + path.string());
  }
  const nlohmann::json j = nlohmann::json::parse(in);
  SimilarityReport report;
  report.synthesized_count = j.at("synthesized_count").get<std::size_t>();
  report.reference_count = j.at("reference_count").get<std::size_t>();
  report.hamming_mean = j.at("hamming_mean").get<double>();
  report.hamming_median = j.at("hamming_median").get<double>();
  report.hamming_max = j.at("hamming_max").get<double>();
  report.synthesized_density_hist = j.at("synthesized_density_hist").get<std::array<double, 16>>();
  report.reference_density_hist = j.at("reference_density_hist").get<std::array<double, 16>>();
  report.histogram_l1 = j.at("histogram_l1").get<double>();
  return report;
}

}  // namespace envsynth::pipeline
