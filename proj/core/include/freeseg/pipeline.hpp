#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "freeseg/io.hpp"

namespace freeseg {

/// Counts for one pipeline stage. records_in always equals
/// records_out + sum of rejects_by_reason.
struct RunReport {
  std::string stage;
  std::int64_t records_in = 0;
  std::int64_t records_out = 0;
  std::map<std::string, std::int64_t> rejects_by_reason;
  double wall_time_sec = 0.0;
  std::map<int, std::int64_t> per_class_counts;  // class id -> records_out share
};

std::int64_t rejects_total(const RunReport& report);

/// Machine-readable report. wall_time_sec varies run to run; everything else
/// is deterministic.
void write_report_json(const RunReport& report, const std::string& path);
void print_report(const RunReport& report, std::ostream& out);

// ---------------------------------------------------------------------------
// Overlay rendering (used by the viz command)
// ---------------------------------------------------------------------------

struct OverlayItem {
  BinaryMask mask;  // may be empty (width 0) for box-only items
  BoundingBox box;
  bool has_box = false;
  bool pasted = false;
  std::string caption;  // drawn when non-empty
};

struct OverlayOptions {
  double alpha = 0.5;  // mask tint strength
};

/// Deterministic per-item tint: warm palette for pasted, cool for native.
std::array<std::uint8_t, 3> overlay_color(std::size_t item_index, bool pasted);

Image render_overlay(const Image& base, const std::vector<OverlayItem>& items,
                     const OverlayOptions& options = {});

/// Score caption for a scored record, e.g. "id=r1 score=0.625 drop=0.9 kept".
std::string viz_caption(const ManifestRecord& record);

// ---------------------------------------------------------------------------
// Batch commands. Each writes its artifacts plus report.json under out_dir
// and returns the report. Fatal conditions (unreadable inputs, bad config,
// empty synth pools) throw; per-record failures become report entries.
// ---------------------------------------------------------------------------

/// Refines every manifest record's raw gray map into a mask PNG and emits
/// the manifest augmented with mask paths (out_dir/refined.jsonl).
RunReport run_refine(const std::string& manifest_path, const PipelineConfig& config,
                     const std::string& out_dir);

/// Scores refined records and applies the dual threshold filter. Emits
/// out_dir/scored.jsonl and a per-class collected/kept summary table.
RunReport run_rank(const std::string& manifest_path, double score_threshold,
                   double drop_threshold, int workers, const std::string& out_dir);

/// Composites kept segments onto backgrounds; emits out_dir/images/*.png,
/// out_dir/annotations.json (COCO-style) and out_dir/stats.json.
/// backgrounds_dir resolves file_name entries; empty means the directory of
/// backgrounds_json.
RunReport run_synth(const std::string& backgrounds_json, const std::string& backgrounds_dir,
                    const std::string& segments_manifest, const PipelineConfig& config,
                    std::size_t count, const std::string& out_dir);

/// Renders overlay PNGs for a COCO file (mask tints) or a scored manifest
/// (mask tint + box + score caption). limit < 0 means no limit.
RunReport run_viz(const std::string& input_path, const std::string& image_dir,
                  std::int64_t limit, const std::string& out_dir);

/// Aggregates manifests into a text table (written to `table`) and, when
/// out_dir is non-empty, out_dir/stats.json.
RunReport run_stats(const std::vector<std::string>& manifest_paths,
                    const std::string& out_dir, std::ostream& table);

}  // namespace freeseg
