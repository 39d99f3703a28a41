#include "envsynth/core/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace envsynth {

double normalize_angle(double theta) {
  double t = std::fmod(theta, 2.0 * M_PI);
  if (t <= -M_PI) t += 2.0 * M_PI;
  if (t > M_PI) t -= 2.0 * M_PI;
  return t;
}

double euclidean(const Pose& a, const Pose& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void validate_trajectory(const Trajectory& traj) {
  if (traj.steps.empty()) {
    throw std::invalid_argument("trajectory must be non-empty");
  }
  if (traj.beam_count <= 0) {
    throw std::invalid_argument("trajectory beam_count must be positive");
  }
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const auto& s = traj.steps[i];
    if (static_cast<int>(s.scan.size()) != traj.beam_count) {
      throw std::invalid_argument("step " + std::to_string(i) +
                                  ": scan size does not match trace beam count");
    }
    for (double r : s.scan) {
      if (!std::isfinite(r) || r < 0.0 || r > traj.max_range + 1e-9) {
        throw std::invalid_argument("step " + std::to_string(i) +
                                    ": range reading outside [0, max_range]");
      }
    }
    if (!std::isfinite(s.pose.x) || !std::isfinite(s.pose.y)) {
      throw std::invalid_argument("step " + std::to_string(i) + ": non-finite pose");
    }
    if (i > 0 && euclidean(traj.steps[i - 1].pose, s.pose) >= 1.0) {
      throw std::invalid_argument("step " + std::to_string(i) +
                                  ": consecutive poses separated by >= 1 m");
    }
  }
}

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::raw: return "raw";
    case SetKind::challenging: return "challenging";
    case SetKind::synthesized: return "synthesized";
  }
  return "raw";
}

SetKind set_kind_from_string(const std::string& s) {
  if (s == "raw") return SetKind::raw;
  if (s == "challenging") return SetKind::challenging;
  if (s == "synthesized") return SetKind::synthesized;
  throw std::invalid_argument("unknown environment set kind: " + s);
}

}  // namespace envsynth
