#include "envsynth/pipeline/stages.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "envsynth/cluster/pca.hpp"
#include "envsynth/cluster/representatives.hpp"
#include "envsynth/core/grid_io.hpp"
#include "envsynth/extract/trace_io.hpp"
#include "envsynth/sim/map_gen.hpp"
#include "envsynth/synth/random_sampling.hpp"

namespace envsynth::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Hashing and manifests

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace {

constexpr std::uint64_t kDeployStream = 11;
constexpr std::uint64_t kGanTrainStream = 21;
constexpr std::uint64_t kGanSampleStream = 22;
constexpr std::uint64_t kClusterStream = 23;
constexpr std::uint64_t kRsStream = 24;
constexpr std::uint64_t kEvalStream = 31;
constexpr std::uint64_t kHoldoutStream = 41;
constexpr std::uint64_t kRawSubsetStream = 42;
constexpr std::uint64_t kDirectionalEvalStream = 43;

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot read " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return hash_hex(fnv1a64(buffer.str()));
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string hash_dir(const fs::path& dir, const std::string& ext) {
  std::string acc;
  for (const auto& f : sorted_files(dir, ext)) {
    acc += f.filename().string();
    acc += ":";
    acc += hash_file(f);
    acc += "\n";
  }
  return hash_hex(fnv1a64(acc));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sig_planner(const sim::PlannerParams& p) {
  return fmt(p.max_linear_velocity) + "," + fmt(p.max_angular_velocity) + "," +
         std::to_string(p.sample_count) + "," + fmt(p.inflation_radius) + "," +
         fmt(p.recovery_reverse_velocity);
}

std::string sig_limits(const sim::SimLimits& l) {
  return std::to_string(l.max_steps) + "," + fmt(l.timestep) + "," +
         fmt(l.goal_tolerance) + "," + std::to_string(l.beam_count) + "," +
         fmt(l.lidar_max_range);
}

std::string deploy_signature(const PipelineConfig& cfg) {
  return "deploy|v1|maps=" + hash_dir(cfg.maps_dir, ".pgm") +
         "|res=" + fmt(cfg.map_resolution) +
         "|per_map=" + std::to_string(cfg.deployments_per_map) +
         "|limits=" + sig_limits(cfg.limits) + "|planner=" + sig_planner(cfg.deploy_params) +
         "|seed=" + std::to_string(cfg.master_seed);
}

std::string extract_signature(const PipelineConfig& cfg) {
  return "extract|v1|traces=" + hash_dir(cfg.traces_dir, ".jsonl") +
         "|segment=" + fmt(cfg.extraction.segment_length) +
         "|threshold=" + std::to_string(cfg.extraction.difficulty_threshold) +
         "|max_range=" + fmt(cfg.extraction.max_range);
}

std::string hash_env_set_dir(const fs::path& dir) {
  std::string acc = hash_dir(dir, ".txt");
  for (const char* name : {"manifest.csv", "set.json"}) {
    if (fs::exists(dir / name)) {
      acc += hash_file(dir / name);
    }
  }
  return hash_hex(fnv1a64(acc));
}

std::string synth_signature(const PipelineConfig& cfg) {
  std::string sig = "synth|v1|challenging=" + hash_env_set_dir(cfg.envs_dir / "challenging") +
                    "|method=" + cfg.method + "|count=" + std::to_string(cfg.synth_count) +
                    "|seed=" + std::to_string(cfg.master_seed);
  if (cfg.method == "gan") {
    sig += "|gan=" + std::to_string(cfg.gan.epochs) + "," +
           std::to_string(cfg.gan.batch_size) + "," + fmt(cfg.gan.learning_rate) + "," +
           fmt(cfg.gan.adam_beta1) + "," + fmt(cfg.gan.adam_beta2) + "," +
           fmt(cfg.gan.adam_epsilon) + "," + std::to_string(cfg.gan.d_steps_per_g_step) +
           "," + std::to_string(cfg.gan.latent_dim) + "," +
           (cfg.gan.loss_mode == gan::GanLossMode::non_saturating ? "ns" : "sat");
  } else if (cfg.method == "pca") {
    sig += "|cluster=" + std::to_string(cfg.cluster_k) + "," +
           std::to_string(cfg.cluster_m) + "," + std::to_string(cfg.cluster_n);
  }
  return sig;
}

std::string evaluate_signature(const PipelineConfig& cfg, const std::string& set_id) {
  std::string cands;
  for (const auto& c : cfg.candidates) cands += sig_planner(c) + ";";
  return "evaluate|v1|set=" + set_id + ":" + hash_env_set_dir(cfg.envs_dir / set_id) +
         "|trials=" + std::to_string(cfg.eval_trials) +
         "|floor=" + fmt(cfg.success_floor) + "|limits=" + sig_limits(cfg.limits) +
         "|candidates=" + cands + "|seed=" + std::to_string(cfg.master_seed);
}

std::string report_signature(const PipelineConfig& cfg) {
  std::string acc = "report|v1";
  for (const char* set : {"raw", "challenging", "synthesized"}) {
    acc += "|" + std::string(set) + "=" + hash_env_set_dir(cfg.envs_dir / set);
  }
  for (const char* f : {"summary.csv", "best_params.json", "directional.json"}) {
    const fs::path p = cfg.reports_dir / f;
    acc += "|";
    acc += fs::exists(p) ? hash_file(p) : std::string("absent");
  }
  const fs::path sim = cfg.envs_dir / "synthesized" / "similarity.json";
  acc += "|";
  acc += fs::exists(sim) ? hash_file(sim) : std::string("absent");
  return acc;
}

std::optional<json> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void write_manifest(const fs::path& path, const json& manifest) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << manifest.dump(2) << "\n";
  if (!out) {
    throw DataError("cannot write manifest: " + path.string());
  }
}

bool stage_cached(const fs::path& manifest_path, const std::string& signature) {
  const auto manifest = read_manifest(manifest_path);
  return manifest && manifest->value("signature", "") == signature;
}

}  // namespace

// ---------------------------------------------------------------------------
// Workspace lock

WorkspaceLock::WorkspaceLock(const fs::path& workspace) {
  fs::create_directories(workspace);
  path_ = workspace / ".envsynth.lock";
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (!f) {
    throw DataError("workspace is locked by another envsynth process (" + path_.string() +
                    " exists; delete it if that process is gone)");
  }
  std::fprintf(f, "pid=%d\n", static_cast<int>(getpid()));
  std::fclose(f);
}

WorkspaceLock::~WorkspaceLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

// ---------------------------------------------------------------------------
// Stages

void cmd_gen_maps(const PipelineConfig& cfg, int count, int rows, int cols) {
  if (count < 1) {
    throw ConfigError("gen-maps: count must be positive");
  }
  fs::create_directories(cfg.maps_dir);
  SeededRng root(stage_seed(cfg.master_seed, 1));
  for (int i = 0; i < count; ++i) {
    const sim::WorldMap map =
        sim::generate_world(rows, cols, cfg.map_resolution, root.split(i).base_seed());
    char name[32];
    std::snprintf(name, sizeof(name), "map_%03d.pgm", i);
    sim::save_world_pgm(map, cfg.maps_dir / name);
  }
  std::cout << "gen-maps: wrote " << count << " maps to " << cfg.maps_dir.string() << "\n";
}

namespace {

std::pair<std::vector<sim::WorldMap>, std::vector<std::string>> load_maps(
    const PipelineConfig& cfg) {
  const auto files = sorted_files(cfg.maps_dir, ".pgm");
  if (files.empty()) {
    throw DataError("no deployment maps found; expected PGM files in " +
                    cfg.maps_dir.string());
  }
  std::vector<sim::WorldMap> maps;
  std::vector<std::string> ids;
  for (const auto& f : files) {
    maps.push_back(sim::load_world_pgm(f, cfg.map_resolution));
    ids.push_back(f.stem().string());
  }
  return {std::move(maps), std::move(ids)};
}

}  // namespace

void cmd_deploy(const PipelineConfig& cfg) {
  const auto [maps, ids] = load_maps(cfg);
  const std::string signature = deploy_signature(cfg);
  const std::uint64_t seed = stage_seed(cfg.master_seed, kDeployStream);

  const auto trajs = sim::deploy_batch(maps, ids, cfg.deploy_params,
                                       cfg.deployments_per_map, cfg.limits, seed);

  fs::create_directories(cfg.traces_dir);
  for (const auto& old : sorted_files(cfg.traces_dir, ".jsonl")) {
    fs::remove(old);
  }
  json manifest;
  manifest["stage"] = "deploy";
  manifest["signature"] = signature;
  manifest["seed"] = seed;
  json traces = json::array();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "trace_%05zu.jsonl", i);
    extract::write_trace(trajs[i], cfg.traces_dir / name);
    json t;
    t["file"] = name;
    t["deployment_id"] = trajs[i].deployment_id;
    t["map_id"] = trajs[i].map_id;
    t["episode_index"] = i;
    traces.push_back(t);
  }
  manifest["traces"] = traces;
  write_manifest(cfg.traces_dir / "deploy_manifest.json", manifest);
  std::cout << "deploy: wrote " << trajs.size() << " traces to "
            << cfg.traces_dir.string() << "\n";
}

void cmd_extract(const PipelineConfig& cfg) {
  if (!fs::exists(cfg.traces_dir) || sorted_files(cfg.traces_dir, ".jsonl").empty()) {
    throw DataError("no traces found in " + cfg.traces_dir.string() + "; run deploy first");
  }
  const std::string signature = extract_signature(cfg);
  std::vector<Trajectory> trajs;
  try {
    trajs = extract::read_traces_dir(cfg.traces_dir);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  const auto result = extract::extract_domain(trajs, cfg.extraction);

  fs::remove_all(cfg.envs_dir / "raw");
  fs::remove_all(cfg.envs_dir / "challenging");
  save_environment_set(result.raw, cfg.envs_dir / "raw");
  save_environment_set(result.challenging, cfg.envs_dir / "challenging");

  json manifest;
  manifest["stage"] = "extract";
  manifest["signature"] = signature;
  manifest["raw_count"] = result.raw.entries.size();
  manifest["challenging_count"] = result.challenging.entries.size();
  manifest["scenarios_skipped"] = result.scenarios_skipped;
  write_manifest(cfg.envs_dir / "extract_manifest.json", manifest);
  std::cout << "extract: " << result.raw.entries.size() << " raw, "
            << result.challenging.entries.size() << " challenging environments ("
            << result.scenarios_skipped << " scenarios skipped)\n";
}

void cmd_synthesize(const PipelineConfig& cfg) {
  const fs::path chal_dir = cfg.envs_dir / "challenging";
  if (!fs::exists(chal_dir / "set.json")) {
    throw DataError("challenging set missing at " + chal_dir.string() +
                    "; run extract first");
  }
  EnvironmentSet challenging = load_environment_set(chal_dir);
  if (challenging.empty()) {
    throw DataError("challenging set is empty; lower extract.difficulty_threshold "
                    "(currently " + std::to_string(cfg.extraction.difficulty_threshold) +
                    ") or deploy on harder maps");
  }
  const std::string signature = synth_signature(cfg);
  const int count = cfg.synth_count;
  const int source_count = static_cast<int>(challenging.entries.size());

  EnvironmentSet synthesized;
  std::string model_file;
  fs::create_directories(cfg.models_dir);
  if (cfg.method == "gan") {
    gan::GanTrainConfig train_cfg = cfg.gan;
    train_cfg.seed = stage_seed(cfg.master_seed, kGanTrainStream);
    if (train_cfg.batch_size > source_count) {
      std::cout << "synthesize: clamping gan.batch_size to dataset size "
                << source_count << "\n";
      train_cfg.batch_size = source_count;
    }
    const gan::GanModel model = gan::train_gan(challenging, train_cfg);
    model_file = "gan.ckpt";
    gan::save_gan(model, cfg.models_dir / model_file);
    SeededRng rng(stage_seed(cfg.master_seed, kGanSampleStream));
    synthesized = gan::sample_environments(model, count, rng);
  } else if (cfg.method == "pca") {
    if (source_count < 2) {
      throw DataError("pca synthesis needs at least 2 challenging environments");
    }
    if (cfg.cluster_m > source_count) {
      throw DataError("cluster.m (" + std::to_string(cfg.cluster_m) +
                      ") exceeds the challenging set size (" +
                      std::to_string(source_count) + ")");
    }
    int k = std::min(cfg.cluster_k,
                     std::min(source_count - 1, OccupancyGrid::kCellCount));
    if (k != cfg.cluster_k) {
      std::cout << "synthesize: clamping cluster.k to " << k << "\n";
    }
    const auto data = cluster::grids_as_matrix(challenging);
    const cluster::PcaModel model = cluster::pca_fit(data, k);
    model_file = "pca.ckpt";
    cluster::save_pca(model, cfg.models_dir / model_file);
    SeededRng rng(stage_seed(cfg.master_seed, kClusterStream));
    synthesized = cluster::select_representatives(challenging, model, cfg.cluster_m,
                                                  cfg.cluster_n, rng);
  } else {  // rs
    SeededRng rng(stage_seed(cfg.master_seed, kRsStream));
    synthesized = synth::sample_uniform(challenging, count, rng);
  }

  fs::remove_all(cfg.envs_dir / "synthesized");
  save_environment_set(synthesized, cfg.envs_dir / "synthesized");
  const SimilarityReport similarity = compute_similarity(synthesized, challenging);
  save_similarity(similarity, cfg.envs_dir / "synthesized" / "similarity.json");

  json manifest;
  manifest["stage"] = "synthesize";
  manifest["signature"] = signature;
  manifest["method"] = cfg.method;
  manifest["count"] = synthesized.entries.size();
  if (!model_file.empty()) manifest["model_file"] = model_file;
  write_manifest(cfg.envs_dir / "synth_manifest.json", manifest);
  std::cout << "synthesize: " << synthesized.entries.size() << " environments via "
            << cfg.method << " (nn hamming mean " << similarity.hamming_mean << ")\n";
}

namespace {

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct CandidateOutcome {
  sim::EvalReport report;
};

int select_best_candidate(const std::vector<sim::EvalReport>& reports,
                          double success_floor, std::string& rule_out) {
  int best = -1;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].success_rate < success_floor) continue;
    if (best < 0 || reports[i].mean_time < reports[best].mean_time) {
      best = static_cast<int>(i);
    }
  }
  if (best >= 0) {
    rule_out = "min_time_above_floor";
    return best;
  }
  // Nothing met the floor: fall back to the highest success rate.
  best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].success_rate > reports[best].success_rate) {
      best = static_cast<int>(i);
    }
  }
  rule_out = "max_success_fallback";
  return best;
}

json planner_to_json(const sim::PlannerParams& p) {
  json j;
  j["max_linear_velocity"] = p.max_linear_velocity;
  j["max_angular_velocity"] = p.max_angular_velocity;
  j["sample_count"] = p.sample_count;
  j["inflation_radius"] = p.inflation_radius;
  j["recovery_reverse_velocity"] = p.recovery_reverse_velocity;
  return j;
}

void check_navigable_set(const EnvironmentSet& set, const fs::path& dir) {
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    if (!sim::is_navigable(set.entries[i].grid)) {
      char name[32];
      std::snprintf(name, sizeof(name), "env_%05zu.pgm", i);
      throw DataError("environment is not navigable: " + (dir / name).string());
    }
  }
}

}  // namespace

void cmd_evaluate(const PipelineConfig& cfg, const std::string& set_id) {
  const fs::path set_dir = cfg.envs_dir / set_id;
  if (!fs::exists(set_dir / "set.json")) {
    throw DataError("environment set '" + set_id + "' missing at " + set_dir.string());
  }
  if (set_id == "synthesized") {
    const auto manifest = read_manifest(cfg.envs_dir / "synth_manifest.json");
    if (manifest && manifest->value("method", "") != cfg.method) {
      throw DataError("stale synthesized artifacts: built with method=" +
                      manifest->value("method", "?") + " but config requests " +
                      cfg.method + "; re-run synthesize");
    }
  }
  const EnvironmentSet set = load_environment_set(set_dir);
  if (set.empty()) {
    throw DataError("environment set '" + set_id + "' is empty");
  }
  check_navigable_set(set, set_dir);
  const std::string signature = evaluate_signature(cfg, set_id);

  fs::create_directories(cfg.reports_dir);
  const std::uint64_t eval_seed = stage_seed(cfg.master_seed, kEvalStream);
  SeededRng eval_root(eval_seed);
  std::vector<sim::EvalReport> reports;
  for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
    const auto report = sim::evaluate(set, cfg.candidates[c], cfg.eval_trials,
                                      cfg.limits, eval_root.split(c).base_seed());
    char name[48];
    std::snprintf(name, sizeof(name), "metrics_cand%zu.csv", c);
    std::ofstream out(cfg.reports_dir / name);
    out << "env_id,trials,successes,success_rate,mean_time_s,std_time_s\n";
    for (const auto& m : report.per_env) {
      out << m.id << "," << m.trials << "," << m.successes << ","
          << csv_num(m.success_rate) << "," << csv_num(m.mean_time) << ","
          << csv_num(m.std_time) << "\n";
    }
    reports.push_back(report);
  }

  // Table-shaped summary: one row per candidate.
  {
    std::ofstream out(cfg.reports_dir / "summary.csv");
    out << "candidate,params,time_cost_s,success_rate_pct\n";
    for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
      out << "cand" << c << ",\"" << sig_planner(cfg.candidates[c]) << "\","
          << csv_num(reports[c].mean_time) << ","
          << csv_num(100.0 * reports[c].success_rate) << "\n";
    }
  }

  std::string rule;
  const int best = select_best_candidate(reports, cfg.success_floor, rule);
  json best_json;
  best_json["candidate_index"] = best;
  best_json["params"] = planner_to_json(cfg.candidates[best]);
  best_json["success_rate"] = reports[best].success_rate;
  best_json["mean_time_s"] = reports[best].mean_time;
  best_json["success_floor"] = cfg.success_floor;
  best_json["selection_rule"] = rule;
  best_json["set_id"] = set_id;
  {
    std::ofstream out(cfg.reports_dir / "best_params.json");
    out << best_json.dump(2) << "\n";
  }

  json manifest;
  manifest["stage"] = "evaluate";
  manifest["signature"] = signature;
  manifest["set_id"] = set_id;
  manifest["best_candidate"] = best;
  write_manifest(cfg.reports_dir / "evaluate_manifest.json", manifest);
  std::cout << "evaluate: " << cfg.candidates.size() << " candidates on '" << set_id
            << "'; best cand" << best << " (success "
            << csv_num(100.0 * reports[best].success_rate) << "%, time "
            << csv_num(reports[best].mean_time) << " s)\n";
}

// ---------------------------------------------------------------------------
// Report

namespace {

void write_montage(const EnvironmentSet& set, const fs::path& path) {
  const int tiles_per_row = 10;
  const int n = static_cast<int>(set.entries.size());
  const int tile_rows = (n + tiles_per_row - 1) / tiles_per_row;
  const int side = OccupancyGrid::kSize;
  PgmImage img;
  img.width = tiles_per_row * side + tiles_per_row + 1;
  img.height = tile_rows * side + tile_rows + 1;
  img.maxval = 255;
  img.values.assign(static_cast<std::size_t>(img.width) * img.height, 128);
  for (int t = 0; t < n; ++t) {
    const int tr = t / tiles_per_row;
    const int tc = t % tiles_per_row;
    const int y0 = 1 + tr * (side + 1);
    const int x0 = 1 + tc * (side + 1);
    const auto& grid = set.entries[t].grid;
    for (int r = 0; r < side; ++r) {
      const int file_row = y0 + (side - 1 - r);  // goal edge at the tile top
      for (int c = 0; c < side; ++c) {
        img.values[static_cast<std::size_t>(file_row) * img.width + x0 + c] =
            grid.at(r, c) ? 0 : 255;
      }
    }
  }
  write_pgm(img, path);
}

}  // namespace

void cmd_report(const PipelineConfig& cfg) {
  fs::create_directories(cfg.reports_dir);
  const std::string signature = report_signature(cfg);
  std::ostringstream text;
  text << "environment synthesis report\n";
  text << "============================\n\n";

  for (const char* name : {"raw", "challenging", "synthesized"}) {
    const fs::path dir = cfg.envs_dir / name;
    if (!fs::exists(dir / "set.json")) {
      text << name << ": not extracted yet\n";
      continue;
    }
    const EnvironmentSet set = load_environment_set(dir);
    text << name << ": " << set.entries.size() << " environments\n";
    if (!set.empty()) {
      write_montage(set, cfg.reports_dir / ("montage_" + std::string(name) + ".pgm"));
    }
  }
  text << "\n";

  const fs::path sim_path = cfg.envs_dir / "synthesized" / "similarity.json";
  if (fs::exists(sim_path)) {
    const SimilarityReport s = load_similarity(sim_path);
    text << "similarity (synthesized vs challenging)\n";
    text << "  nearest-neighbor hamming mean/median/max: " << s.hamming_mean << " / "
         << s.hamming_median << " / " << s.hamming_max << " (of 900 cells)\n";
    text << "  occupancy-density histogram L1 distance: " << s.histogram_l1 << "\n\n";
  }

  const fs::path summary_path = cfg.reports_dir / "summary.csv";
  if (fs::exists(summary_path)) {
    std::ifstream in(summary_path);
    text << "evaluation summary (" << summary_path.filename().string() << ")\n";
    std::string line;
    while (std::getline(in, line)) text << "  " << line << "\n";
    text << "\n";
  }

  const fs::path dir_path = cfg.reports_dir / "directional.json";
  if (fs::exists(dir_path)) {
    std::ifstream in(dir_path);
    const json d = json::parse(in);
    text << "directional sanity (non-binding)\n";
    text << "  params selected on synthesized: success "
         << csv_num(100.0 * d.value("synthesized_selected_success", 0.0))
         << "% on held-out challenging\n";
    text << "  params selected on raw subset:  success "
         << csv_num(100.0 * d.value("raw_selected_success", 0.0))
         << "% on held-out challenging\n\n";
  }

  {
    std::ofstream out(cfg.reports_dir / "report.txt");
    out << text.str();
  }
  json manifest;
  manifest["stage"] = "report";
  manifest["signature"] = signature;
  write_manifest(cfg.reports_dir / "report_manifest.json", manifest);
  std::cout << "report: bundle written to " << cfg.reports_dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// run-all and directional sanity

namespace {

template <typename Fn>
void run_stage(const char* name, const fs::path& manifest_path,
               const std::string& signature, bool force, Fn&& fn) {
  if (!force && stage_cached(manifest_path, signature)) {
    std::cout << name << ": cached, skipping\n";
    return;
  }
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage " + std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + std::string(name) + ": " + e.what());
  }
}

}  // namespace

void cmd_run_all(const PipelineConfig& cfg, bool force) {
  run_stage("deploy", cfg.traces_dir / "deploy_manifest.json", deploy_signature(cfg),
            force, [&] { cmd_deploy(cfg); });
  run_stage("extract", cfg.envs_dir / "extract_manifest.json", extract_signature(cfg),
            force, [&] { cmd_extract(cfg); });
  run_stage("synthesize", cfg.envs_dir / "synth_manifest.json", synth_signature(cfg),
            force, [&] { cmd_synthesize(cfg); });
  run_stage("evaluate", cfg.reports_dir / "evaluate_manifest.json",
            evaluate_signature(cfg, "synthesized"), force,
            [&] { cmd_evaluate(cfg, "synthesized"); });
  run_stage("report", cfg.reports_dir / "report_manifest.json", report_signature(cfg),
            force, [&] { cmd_report(cfg); });
}

namespace {

EnvironmentSet navigable_subset(const EnvironmentSet& set) {
  EnvironmentSet out;
  out.kind = set.kind;
  for (const auto& e : set.entries) {
    if (sim::is_navigable(e.grid)) out.entries.push_back(e);
  }
  return out;
}

int best_candidate_on(const PipelineConfig& cfg, const EnvironmentSet& set,
                      std::uint64_t seed) {
  SeededRng root(seed);
  std::vector<sim::EvalReport> reports;
  for (std::size_t c = 0; c < cfg.candidates.size(); ++c) {
    reports.push_back(sim::evaluate(set, cfg.candidates[c], cfg.eval_trials, cfg.limits,
                                    root.split(c).base_seed()));
  }
  std::string rule;
  return select_best_candidate(reports, cfg.success_floor, rule);
}

}  // namespace

DirectionalResult directional_sanity(const PipelineConfig& cfg) {
  const EnvironmentSet raw = navigable_subset(load_environment_set(cfg.envs_dir / "raw"));
  const EnvironmentSet challenging =
      navigable_subset(load_environment_set(cfg.envs_dir / "challenging"));
  const EnvironmentSet synthesized =
      load_environment_set(cfg.envs_dir / "synthesized");
  if (raw.empty() || challenging.empty() || synthesized.empty()) {
    throw DataError("directional sanity needs raw, challenging and synthesized sets");
  }

  // Held-out challenging environments.
  SeededRng holdout_rng(stage_seed(cfg.master_seed, kHoldoutStream));
  std::vector<int> indices(challenging.entries.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
  const int holdout_n = std::min<int>(10, static_cast<int>(indices.size()));
  for (int t = 0; t < holdout_n; ++t) {
    const std::size_t pick = t + holdout_rng.next_index(indices.size() - t);
    std::swap(indices[t], indices[pick]);
  }
  EnvironmentSet held_out;
  held_out.kind = SetKind::challenging;
  for (int t = 0; t < holdout_n; ++t) {
    held_out.entries.push_back(challenging.entries[indices[t]]);
  }

  // Same-size random subset of raw (the unfiltered baseline).
  SeededRng raw_rng(stage_seed(cfg.master_seed, kRawSubsetStream));
  const int subset_n =
      std::min<int>(static_cast<int>(synthesized.entries.size()),
                    static_cast<int>(raw.entries.size()));
  std::vector<int> raw_idx(raw.entries.size());
  for (std::size_t i = 0; i < raw_idx.size(); ++i) raw_idx[i] = static_cast<int>(i);
  for (int t = 0; t < subset_n; ++t) {
    const std::size_t pick = t + raw_rng.next_index(raw_idx.size() - t);
    std::swap(raw_idx[t], raw_idx[pick]);
  }
  EnvironmentSet raw_subset;
  raw_subset.kind = SetKind::raw;
  for (int t = 0; t < subset_n; ++t) {
    raw_subset.entries.push_back(raw.entries[raw_idx[t]]);
  }

  const std::uint64_t sel_seed = stage_seed(cfg.master_seed, kDirectionalEvalStream);
  const int best_synth = best_candidate_on(cfg, synthesized, sel_seed);
  const int best_raw = best_candidate_on(cfg, raw_subset, sel_seed + 1);

  SeededRng eval_root(stage_seed(cfg.master_seed, kDirectionalEvalStream + 100));
  const auto synth_eval = sim::evaluate(held_out, cfg.candidates[best_synth],
                                        cfg.eval_trials, cfg.limits,
                                        eval_root.split(0).base_seed());
  const auto raw_eval = sim::evaluate(held_out, cfg.candidates[best_raw],
                                      cfg.eval_trials, cfg.limits,
                                      eval_root.split(1).base_seed());

  DirectionalResult result;
  result.synthesized_selected_success = synth_eval.success_rate;
  result.raw_selected_success = raw_eval.success_rate;
  result.synthesized_selected_time = synth_eval.mean_time;
  result.raw_selected_time = raw_eval.mean_time;
  result.held_out_count = holdout_n;

  fs::create_directories(cfg.reports_dir);
  json j;
  j["synthesized_selected_candidate"] = best_synth;
  j["raw_selected_candidate"] = best_raw;
  j["synthesized_selected_success"] = result.synthesized_selected_success;
  j["raw_selected_success"] = result.raw_selected_success;
  j["synthesized_selected_time_s"] = result.synthesized_selected_time;
  j["raw_selected_time_s"] = result.raw_selected_time;
  j["held_out_count"] = result.held_out_count;
  std::ofstream out(cfg.reports_dir / "directional.json");
  out << j.dump(2) << "\n";
  return result;
}

}  // namespace envsynth::pipeline
