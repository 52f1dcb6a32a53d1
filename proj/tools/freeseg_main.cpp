// Batch frontend for the segment refinement / ranking / synthesis pipeline.
// Exit code is 0 unless a fatal error occurs; per-record failures only show
// up in the run reports.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freeseg/error.hpp"
#include "freeseg/pipeline.hpp"

namespace {

freeseg::PipelineConfig make_config(const std::string& config_path,
                                    const std::optional<std::uint64_t>& seed,
                                    const std::optional<int>& workers) {
  freeseg::PipelineConfig config;
  if (!config_path.empty()) config = freeseg::load_config(config_path);
  freeseg::apply_env_overrides(config);
  if (seed) config.synth.seed = *seed;      // flags win over config and env
  if (workers) config.io.workers = *workers;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free object segments: refine, rank, synthesize"};
  app.require_subcommand(1);
  app.fallthrough();  // --config/--seed/--workers parse after the subcommand too

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  app.add_option("--config", config_path, "pipeline config JSON")->configurable(false);
  app.add_option("--seed", seed, "root RNG seed (overrides config and FREESEG_SEED)");
  app.add_option("--workers", workers, "data-parallel worker count");

  auto* refine = app.add_subcommand("refine", "raw gray maps -> binary mask PNGs");
  std::string refine_manifest, refine_out = "out";
  refine->add_option("--manifest", refine_manifest, "candidate manifest (JSONL)")->required();
  refine->add_option("--out", refine_out, "output directory");

  auto* rank = app.add_subcommand("rank", "score refined segments and filter");
  std::string rank_manifest, rank_out = "out";
  std::optional<double> score_threshold, drop_threshold;
  rank->add_option("--manifest", rank_manifest, "refined manifest (JSONL)")->required();
  rank->add_option("--score-threshold", score_threshold, "FreeSeg score cutoff (default 0.5)");
  rank->add_option("--drop-threshold", drop_threshold, "drop rate cutoff (default 0.5)");
  rank->add_option("--out", rank_out, "output directory");

  auto* synth = app.add_subcommand("synth", "paste kept segments onto backgrounds");
  std::string synth_backgrounds, synth_bg_dir, synth_segments, synth_class_map;
  std::string synth_out = "out";
  std::size_t synth_count = 0;
  synth->add_option("--backgrounds", synth_backgrounds, "background COCO JSON")->required();
  synth->add_option("--bg-dir", synth_bg_dir, "background image directory (default: JSON's)");
  synth->add_option("--segments", synth_segments, "scored manifest (JSONL)")->required();
  synth->add_option("--count", synth_count, "number of scenes to synthesize")->required();
  synth->add_option("--class-map", synth_class_map,
                    "two-column file remapping segment class ids");
  synth->add_option("--out", synth_out, "output directory");

  auto* viz = app.add_subcommand("viz", "overlay PNGs for a COCO file or scored manifest");
  std::string viz_input, viz_image_dir, viz_out = "out";
  std::int64_t viz_limit = -1;
  viz->add_option("--input", viz_input, "COCO JSON or manifest JSONL")->required();
  viz->add_option("--image-dir", viz_image_dir, "image directory for COCO inputs");
  viz->add_option("--limit", viz_limit, "max overlays to emit (-1 = all)");
  viz->add_option("--out", viz_out, "output directory");

  auto* stats = app.add_subcommand("stats", "aggregate manifest counts");
  std::vector<std::string> stats_manifests;
  std::string stats_out;
  stats->add_option("manifests", stats_manifests, "manifest files")->required();
  stats->add_option("--out", stats_out, "directory for stats.json (optional)");

  CLI11_PARSE(app, argc, argv);

  try {
    freeseg::PipelineConfig config = make_config(config_path, seed, workers);
    freeseg::RunReport report;
    if (*refine) {
      report = freeseg::run_refine(refine_manifest, config, refine_out);
    } else if (*rank) {
      report = freeseg::run_rank(rank_manifest,
                                 score_threshold.value_or(config.score_threshold),
                                 drop_threshold.value_or(config.drop_threshold),
                                 config.io.workers, rank_out);
    } else if (*synth) {
      if (!synth_class_map.empty()) config.io.class_map = synth_class_map;
      report = freeseg::run_synth(synth_backgrounds, synth_bg_dir, synth_segments, config,
                                  synth_count, synth_out);
    } else if (*viz) {
      report = freeseg::run_viz(viz_input, viz_image_dir, viz_limit, viz_out);
    } else if (*stats) {
      report = freeseg::run_stats(stats_manifests, stats_out, std::cout);
    }
    freeseg::print_report(report, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
