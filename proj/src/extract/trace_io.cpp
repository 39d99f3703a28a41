#include "envsynth/extract/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace envsynth::extract {

namespace fs = std::filesystem;
using nlohmann::json;

void write_trace(const Trajectory& traj, const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write trace: " + path.string());
  }
  json header;
  header["type"] = "header";
  header["deployment_id"] = traj.deployment_id;
  header["map_id"] = traj.map_id;
  header["beam_count"] = traj.beam_count;
  header["max_range"] = traj.max_range;
  out << header.dump() << "\n";
  for (const auto& step : traj.steps) {
    json j;
    j["scan"] = step.scan;
    j["x"] = step.pose.x;
    j["y"] = step.pose.y;
    j["theta"] = step.pose.theta;
    j["suboptimal"] = step.suboptimal;
    out << j.dump() << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

Trajectory read_trace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trace: " + path.string());
  }
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path.filename().string() + ":" + std::to_string(line_no) +
                               ": malformed JSON line (" + e.what() + ")");
    }
    try {
      if (!have_header) {
        if (j.value("type", "") != "header") {
          throw std::runtime_error("first line must be the trace header");
        }
        traj.deployment_id = j.at("deployment_id").get<std::string>();
        traj.map_id = j.at("map_id").get<std::string>();
        traj.beam_count = j.at("beam_count").get<int>();
        traj.max_range = j.at("max_range").get<double>();
        if (traj.beam_count <= 0 || !(traj.max_range > 0.0)) {
          throw std::runtime_error("header beam_count/max_range must be positive");
        }
        have_header = true;
        continue;
      }
      StepRecord step;
      step.scan = j.at("scan").get<std::vector<double>>();
      step.pose.x = j.at("x").get<double>();
      step.pose.y = j.at("y").get<double>();
      step.pose.theta = normalize_angle(j.at("theta").get<double>());
      step.suboptimal = j.at("suboptimal").get<int>();
      if (step.suboptimal != 0 && step.suboptimal != 1) {
        throw std::runtime_error("suboptimal flag must be 0 or 1");
      }
      for (auto& r : step.scan) {
        if (!std::isfinite(r) || r < 0.0) {
          throw std::runtime_error("range readings must be finite and non-negative");
        }
        r = std::min(r, traj.max_range);
      }
      traj.steps.push_back(std::move(step));
    } catch (const json::exception& e) {
      throw std::runtime_error(path.filename().string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(path.filename().string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  if (!have_header) {
    throw std::runtime_error(path.filename().string() + ": missing trace header");
  }
  validate_trajectory(traj);
  return traj;
}

std::vector<Trajectory> read_traces_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Trajectory> trajs;
  trajs.reserve(files.size());
  for (const auto& f : files) {
    trajs.push_back(read_trace(f));
  }
  return trajs;
}

}  // namespace envsynth::extract
