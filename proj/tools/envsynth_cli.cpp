// envsynth: mine challenging navigation scenarios from deployment traces,
// synthesize compact training environment sets, and evaluate planner
// parameters on them.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "envsynth/pipeline/stages.hpp"

namespace {

using envsynth::pipeline::ConfigError;
using envsynth::pipeline::DataError;
using envsynth::pipeline::PipelineConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"environment mining and synthesis pipeline"};
  app.require_subcommand(1);

  std::string config_path = "envsynth.conf";
  std::optional<std::uint64_t> seed_override;
  bool force = false;
  app.add_option("--config", config_path, "flat key=value config file")
      ->capture_default_str();
  app.add_option("--seed", seed_override, "override the master seed");
  app.add_flag("--force", force, "ignore cached stage outputs");

  auto* gen_maps = app.add_subcommand("gen-maps", "generate procedural deployment maps");
  int gm_count = 2, gm_rows = 120, gm_cols = 120;
  gen_maps->add_option("--count", gm_count, "number of maps")->capture_default_str();
  gen_maps->add_option("--rows", gm_rows, "map height in cells")->capture_default_str();
  gen_maps->add_option("--cols", gm_cols, "map width in cells")->capture_default_str();

  app.add_subcommand("deploy", "run deployments on the maps and record traces");
  app.add_subcommand("extract", "segment traces into scenario environments");
  app.add_subcommand("synthesize", "build the training environment set");
  auto* evaluate = app.add_subcommand("evaluate", "grid-search planner parameters");
  std::string eval_set = "synthesized";
  bool eval_directional = false;
  evaluate->add_option("--set", eval_set, "environment set id (raw|challenging|synthesized)")
      ->capture_default_str();
  evaluate->add_flag("--directional", eval_directional,
                     "also compare selection on synthesized vs a raw subset");
  app.add_subcommand("report", "render montages, similarity and metrics tables");
  app.add_subcommand("run-all", "deploy -> extract -> synthesize -> evaluate -> report");

  std::string method_override;
  app.add_option("--method", method_override, "override synth.method (gan|pca|rs)");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = envsynth::pipeline::parse_config_file(config_path);
    if (seed_override) cfg.master_seed = *seed_override;
    if (!method_override.empty()) {
      cfg.method = method_override;
      cfg.validate();
    }

    envsynth::pipeline::WorkspaceLock lock(cfg.workspace);
    if (gen_maps->parsed()) {
      envsynth::pipeline::cmd_gen_maps(cfg, gm_count, gm_rows, gm_cols);
    } else if (app.got_subcommand("deploy")) {
      envsynth::pipeline::cmd_deploy(cfg);
    } else if (app.got_subcommand("extract")) {
      envsynth::pipeline::cmd_extract(cfg);
    } else if (app.got_subcommand("synthesize")) {
      envsynth::pipeline::cmd_synthesize(cfg);
    } else if (evaluate->parsed()) {
      envsynth::pipeline::cmd_evaluate(cfg, eval_set);
      if (eval_directional) {
        const auto d = envsynth::pipeline::directional_sanity(cfg);
        std::cout << "directional: synthesized-selected success "
                  << 100.0 * d.synthesized_selected_success
                  << "% vs raw-selected " << 100.0 * d.raw_selected_success
                  << "% on " << d.held_out_count << " held-out challenging envs\n";
      }
    } else if (app.got_subcommand("report")) {
      envsynth::pipeline::cmd_report(cfg);
    } else if (app.got_subcommand("run-all")) {
      envsynth::pipeline::cmd_run_all(cfg, force);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
