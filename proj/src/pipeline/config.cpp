#include "envsynth/pipeline/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "envsynth/core/rng.hpp"

namespace envsynth::pipeline {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  if (method != "gan" && method != "pca" && method != "rs") {
    throw ConfigError("synth.method must be one of gan, pca, rs (got '" + method + "')");
  }
  if (synth_count < 0) {
    throw ConfigError("synth.count must be non-negative");
  }
  if (method == "pca" && cluster_m * cluster_n != synth_count) {
    throw ConfigError("cluster.m * cluster.n must equal synth.count (" +
                      std::to_string(cluster_m) + "*" + std::to_string(cluster_n) +
                      " != " + std::to_string(synth_count) + ")");
  }
  if (cluster_k < 1 || cluster_m < 1 || cluster_n < 1) {
    throw ConfigError("cluster settings must be positive");
  }
  if (deployments_per_map < 1) {
    throw ConfigError("deploy.deployments_per_map must be positive");
  }
  if (eval_trials < 1) {
    throw ConfigError("evaluate.trials must be positive");
  }
  if (success_floor < 0.0 || success_floor > 1.0) {
    throw ConfigError("evaluate.success_floor must lie in [0, 1]");
  }
  if (candidates.empty()) {
    throw ConfigError("evaluate.candidates must list at least one parameter set");
  }
  try {
    for (const auto& c : candidates) c.validate();
    deploy_params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(map_resolution > 0.0)) {
    throw ConfigError("map_resolution must be positive");
  }
  if (extraction.segment_length <= 0.0) {
    throw ConfigError("extract.segment_length must be positive");
  }
  if (extraction.difficulty_threshold < 0) {
    throw ConfigError("extract.difficulty_threshold must be non-negative");
  }
  if (gan.epochs < 1 || gan.batch_size < 1 || gan.learning_rate <= 0.0 ||
      gan.d_steps_per_g_step < 1 || gan.latent_dim < 1) {
    throw ConfigError("gan settings must be positive");
  }
  if (limits.max_steps < 1 || limits.timestep <= 0.0 || limits.goal_tolerance <= 0.0 ||
      limits.beam_count < 1 || limits.lidar_max_range <= 0.0) {
    throw ConfigError("deploy simulator limits must be positive");
  }
}

PipelineConfig default_config() {
  PipelineConfig cfg;
  // DWA-slow-like deployment parameters and a slow/fast evaluation pair.
  cfg.deploy_params = sim::PlannerParams{0.5, 1.5, 12, 0.08, -0.2};
  cfg.candidates = {sim::PlannerParams{0.5, 1.5, 12, 0.08, -0.2},
                    sim::PlannerParams{1.0, 1.5, 24, 0.08, -0.2}};
  return cfg;
}

namespace {

sim::PlannerParams parse_candidate(const std::string& text) {
  std::istringstream ss(text);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad candidate field '" + tok + "' in '" + text + "'");
    }
  }
  if (vals.size() != 5) {
    throw ConfigError("candidate needs 5 comma-separated fields "
                      "(v_max,w_max,samples,inflation,reverse): '" + text + "'");
  }
  sim::PlannerParams p;
  p.max_linear_velocity = vals[0];
  p.max_angular_velocity = vals[1];
  p.sample_count = static_cast<int>(vals[2]);
  p.inflation_radius = vals[3];
  p.recovery_reverse_velocity = vals[4];
  return p;
}

std::string format_candidate(const sim::PlannerParams& p) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%g,%g,%d,%g,%g", p.max_linear_velocity,
                p.max_angular_velocity, p.sample_count, p.inflation_radius,
                p.recovery_reverse_velocity);
  return buf;
}

}  // namespace

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg = default_config();
  bool have_candidates = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    // trim
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    try {
      if (key == "workspace") cfg.workspace = value;
      else if (key == "maps_dir") cfg.maps_dir = value;
      else if (key == "traces_dir") cfg.traces_dir = value;
      else if (key == "envs_dir") cfg.envs_dir = value;
      else if (key == "models_dir") cfg.models_dir = value;
      else if (key == "reports_dir") cfg.reports_dir = value;
      else if (key == "map_resolution") cfg.map_resolution = std::stod(value);
      else if (key == "seed") cfg.master_seed = std::stoull(value);
      else if (key == "extract.segment_length") cfg.extraction.segment_length = std::stod(value);
      else if (key == "extract.difficulty_threshold") cfg.extraction.difficulty_threshold = std::stoll(value);
      else if (key == "extract.max_range") cfg.extraction.max_range = std::stod(value);
      else if (key == "gan.epochs") cfg.gan.epochs = std::stoi(value);
      else if (key == "gan.batch_size") cfg.gan.batch_size = std::stoi(value);
      else if (key == "gan.learning_rate") cfg.gan.learning_rate = std::stod(value);
      else if (key == "gan.beta1") cfg.gan.adam_beta1 = std::stod(value);
      else if (key == "gan.beta2") cfg.gan.adam_beta2 = std::stod(value);
      else if (key == "gan.epsilon") cfg.gan.adam_epsilon = std::stod(value);
      else if (key == "gan.d_steps") cfg.gan.d_steps_per_g_step = std::stoi(value);
      else if (key == "gan.latent_dim") cfg.gan.latent_dim = std::stoi(value);
      else if (key == "gan.loss") {
        if (value == "non_saturating") cfg.gan.loss_mode = gan::GanLossMode::non_saturating;
        else if (value == "saturating") cfg.gan.loss_mode = gan::GanLossMode::saturating;
        else throw ConfigError("gan.loss must be non_saturating or saturating");
      }
      else if (key == "cluster.k") cfg.cluster_k = std::stoi(value);
      else if (key == "cluster.m") cfg.cluster_m = std::stoi(value);
      else if (key == "cluster.n") cfg.cluster_n = std::stoi(value);
      else if (key == "synth.method") cfg.method = value;
      else if (key == "synth.count") cfg.synth_count = std::stoi(value);
      else if (key == "deploy.deployments_per_map") cfg.deployments_per_map = std::stoi(value);
      else if (key == "deploy.beam_count") cfg.limits.beam_count = std::stoi(value);
      else if (key == "deploy.max_range") cfg.limits.lidar_max_range = std::stod(value);
      else if (key == "deploy.timestep") cfg.limits.timestep = std::stod(value);
      else if (key == "deploy.goal_tolerance") cfg.limits.goal_tolerance = std::stod(value);
      else if (key == "deploy.max_steps") cfg.limits.max_steps = std::stoi(value);
      else if (key == "planner.max_linear_velocity") cfg.deploy_params.max_linear_velocity = std::stod(value);
      else if (key == "planner.max_angular_velocity") cfg.deploy_params.max_angular_velocity = std::stod(value);
      else if (key == "planner.sample_count") cfg.deploy_params.sample_count = std::stoi(value);
      else if (key == "planner.inflation_radius") cfg.deploy_params.inflation_radius = std::stod(value);
      else if (key == "planner.recovery_reverse_velocity") cfg.deploy_params.recovery_reverse_velocity = std::stod(value);
      else if (key == "evaluate.trials") cfg.eval_trials = std::stoi(value);
      else if (key == "evaluate.success_floor") cfg.success_floor = std::stod(value);
      else if (key == "evaluate.candidates") {
        cfg.candidates.clear();
        std::istringstream cands(value);
        std::string cand;
        while (std::getline(cands, cand, ';')) {
          if (!cand.empty()) cfg.candidates.push_back(parse_candidate(cand));
        }
        have_candidates = true;
      }
      else throw ConfigError("unknown config key '" + key + "' (line " +
                             std::to_string(line_no) + ")");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(line_no) + " (" + key +
                        "): " + e.what());
    }
  }
  if (have_candidates && cfg.candidates.empty()) {
    throw ConfigError("evaluate.candidates is empty");
  }

  // Unset paths default under the workspace.
  if (cfg.maps_dir.empty()) cfg.maps_dir = cfg.workspace / "maps";
  if (cfg.traces_dir.empty()) cfg.traces_dir = cfg.workspace / "traces";
  if (cfg.envs_dir.empty()) cfg.envs_dir = cfg.workspace / "envs";
  if (cfg.models_dir.empty()) cfg.models_dir = cfg.workspace / "models";
  if (cfg.reports_dir.empty()) cfg.reports_dir = cfg.workspace / "reports";
  cfg.validate();
  return cfg;
}

PipelineConfig parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string canonical_config_string(const PipelineConfig& cfg) {
  std::map<std::string, std::string> kv;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  kv["map_resolution"] = num(cfg.map_resolution);
  kv["seed"] = std::to_string(cfg.master_seed);
  kv["extract.segment_length"] = num(cfg.extraction.segment_length);
  kv["extract.difficulty_threshold"] = std::to_string(cfg.extraction.difficulty_threshold);
  kv["extract.max_range"] = num(cfg.extraction.max_range);
  kv["gan.epochs"] = std::to_string(cfg.gan.epochs);
  kv["gan.batch_size"] = std::to_string(cfg.gan.batch_size);
  kv["gan.learning_rate"] = num(cfg.gan.learning_rate);
  kv["gan.beta1"] = num(cfg.gan.adam_beta1);
  kv["gan.beta2"] = num(cfg.gan.adam_beta2);
  kv["gan.epsilon"] = num(cfg.gan.adam_epsilon);
  kv["gan.d_steps"] = std::to_string(cfg.gan.d_steps_per_g_step);
  kv["gan.latent_dim"] = std::to_string(cfg.gan.latent_dim);
  kv["gan.loss"] = cfg.gan.loss_mode == gan::GanLossMode::non_saturating
                       ? "non_saturating"
                       : "saturating";
  kv["cluster.k"] = std::to_string(cfg.cluster_k);
  kv["cluster.m"] = std::to_string(cfg.cluster_m);
  kv["cluster.n"] = std::to_string(cfg.cluster_n);
  kv["synth.method"] = cfg.method;
  kv["synth.count"] = std::to_string(cfg.synth_count);
  kv["deploy.deployments_per_map"] = std::to_string(cfg.deployments_per_map);
  kv["deploy.beam_count"] = std::to_string(cfg.limits.beam_count);
  kv["deploy.max_range"] = num(cfg.limits.lidar_max_range);
  kv["deploy.timestep"] = num(cfg.limits.timestep);
  kv["deploy.goal_tolerance"] = num(cfg.limits.goal_tolerance);
  kv["deploy.max_steps"] = std::to_string(cfg.limits.max_steps);
  kv["planner"] = format_candidate(cfg.deploy_params);
  kv["evaluate.trials"] = std::to_string(cfg.eval_trials);
  kv["evaluate.success_floor"] = num(cfg.success_floor);
  std::string cands;
  for (const auto& c : cfg.candidates) {
    if (!cands.empty()) cands += ";";
    cands += format_candidate(c);
  }
  kv["evaluate.candidates"] = cands;

  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += "=";
    out += v;
    out += "\n";
  }
  return out;
}

std::uint64_t stage_seed(std::uint64_t master_seed, std::uint64_t stage_id) {
  return SeededRng(master_seed).split(stage_id).base_seed();
}

}  // namespace envsynth::pipeline
