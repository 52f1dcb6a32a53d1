#include "freeseg/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "freeseg/error.hpp"
#include "freeseg/rank.hpp"
#include "freeseg/refine.hpp"
#include "freeseg/synth.hpp"
#include "parallel.hpp"

namespace freeseg {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out += ok ? c : '_';
    if (out.size() >= 80) break;
  }
  return out;
}

std::string scene_file_name(std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "images/scene_%06zu.png", index);
  return buf;
}

void report_progress(const char* stage, std::size_t done, std::size_t total) {
  if (done % 1000 == 0 && done > 0)
    std::fprintf(stderr, "[%s] %zu/%zu\n", stage, done, total);
}

void write_text(const std::string& path, const std::string& contents) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << contents;
}

}  // namespace

std::int64_t rejects_total(const RunReport& report) {
  std::int64_t n = 0;
  for (const auto& [_, c] : report.rejects_by_reason) n += c;
  return n;
}

void write_report_json(const RunReport& report, const std::string& path) {
  ordered_json j;
  j["stage"] = report.stage;
  j["records_in"] = report.records_in;
  j["records_out"] = report.records_out;
  j["rejects_by_reason"] = ordered_json::object();
  for (const auto& [reason, count] : report.rejects_by_reason)
    j["rejects_by_reason"][reason] = count;
  j["wall_time_sec"] = report.wall_time_sec;
  j["per_class_counts"] = ordered_json::object();
  for (const auto& [cid, count] : report.per_class_counts)
    j["per_class_counts"][std::to_string(cid)] = count;
  write_text(path, j.dump(2) + "\n");
}

void print_report(const RunReport& report, std::ostream& out) {
  out << "[" << report.stage << "] in=" << report.records_in
      << " out=" << report.records_out << " rejected=" << rejects_total(report)
      << " wall=" << std::fixed << std::setprecision(2) << report.wall_time_sec << "s\n";
  out.unsetf(std::ios::floatfield);
  for (const auto& [reason, count] : report.rejects_by_reason)
    out << "  reject " << reason << ": " << count << "\n";
}

// ---------------------------------------------------------------------------
// refine
// ---------------------------------------------------------------------------

RunReport run_refine(const std::string& manifest_path, const PipelineConfig& config,
                     const std::string& out_dir) {
  const Timer timer;
  config.refine.validate();
  ManifestReadResult input = read_candidate_manifest(manifest_path);
  for (const std::string& d : input.diagnostics)
    std::fprintf(stderr, "[refine] %s: %s\n", manifest_path.c_str(), d.c_str());

  fs::create_directories(fs::path(out_dir) / "masks");

  struct Outcome {
    ManifestRecord record;
    bool refined = false;
    std::string reason;
  };
  std::vector<Outcome> outcomes(input.records.size());
  std::atomic<std::size_t> done{0};

  parallel_for(input.records.size(), config.io.workers, [&](std::size_t i) {
    Outcome& o = outcomes[i];
    o.record = input.records[i];
    GrayMap map;
    try {
      map = decode_graymap(o.record.raw_map_path);
    } catch (const Error& e) {
      o.reason = "decode_error";
      o.record.reject_reason = o.reason;
      report_progress("refine", done.fetch_add(1) + 1, input.records.size());
      return;
    }
    BinaryMask mask;
    try {
      mask = refine_segment(map, config.refine);
    } catch (const Error&) {
      o.reason = "constant_map";
      o.record.reject_reason = o.reason;
      report_progress("refine", done.fetch_add(1) + 1, input.records.size());
      return;
    }
    if (area(mask) == 0) {
      o.reason = "empty_mask";
      o.record.reject_reason = o.reason;
    } else {
      char name[128];
      std::snprintf(name, sizeof(name), "masks/%06zu_%s.png", i,
                    sanitize_id(o.record.record_id).c_str());
      const std::string path = (fs::path(out_dir) / name).string();
      encode_png(mask, path);
      o.record.mask_path = path;
      o.refined = true;
    }
    report_progress("refine", done.fetch_add(1) + 1, input.records.size());
  });

  RunReport report;
  report.stage = "refine";
  report.records_in =
      static_cast<std::int64_t>(input.records.size() + input.diagnostics.size());
  if (!input.diagnostics.empty())
    report.rejects_by_reason["malformed_line"] =
        static_cast<std::int64_t>(input.diagnostics.size());

  std::vector<ManifestRecord> out_records;
  out_records.reserve(outcomes.size());
  for (const Outcome& o : outcomes) {
    if (o.refined) {
      ++report.records_out;
      ++report.per_class_counts[o.record.class_id];
    } else {
      ++report.rejects_by_reason[o.reason];
    }
    out_records.push_back(o.record);
  }
  write_candidate_manifest(out_records, (fs::path(out_dir) / "refined.jsonl").string());
  report.wall_time_sec = timer.seconds();
  write_report_json(report, (fs::path(out_dir) / "report_refine.json").string());
  return report;
}

// ---------------------------------------------------------------------------
// rank
// ---------------------------------------------------------------------------

RunReport run_rank(const std::string& manifest_path, double score_threshold,
                   double drop_threshold, int workers, const std::string& out_dir) {
  const Timer timer;
  if (score_threshold < 0 || score_threshold > 1 || drop_threshold < 0 || drop_threshold > 1)
    throw Error("rank thresholds must lie in [0,1]");
  ManifestReadResult input = read_candidate_manifest(manifest_path);
  for (const std::string& d : input.diagnostics)
    std::fprintf(stderr, "[rank] %s: %s\n", manifest_path.c_str(), d.c_str());

  std::vector<ManifestRecord> records = std::move(input.records);
  std::atomic<std::size_t> done{0};

  parallel_for(records.size(), workers, [&](std::size_t i) {
    ManifestRecord& rec = records[i];
    const auto finish = [&] { report_progress("rank", done.fetch_add(1) + 1, records.size()); };
    if (rec.reject_reason && !rec.reject_reason->empty() && !rec.mask_path) {
      // upstream reject (e.g. constant_map) passes through unscored
      rec.iob = rec.iom = rec.freeseg_score = rec.drop_rate = 0.0;
      rec.kept = false;
      finish();
      return;
    }
    if (!rec.mask_path) {
      rec.iob = rec.iom = rec.freeseg_score = rec.drop_rate = 0.0;
      rec.kept = false;
      rec.reject_reason = "missing_mask";
      finish();
      return;
    }
    RankInput in;
    in.record_id = rec.record_id;
    in.class_id = rec.class_id;
    in.box = rec.box;
    in.conf = {rec.conf_before, rec.conf_after};
    try {
      in.mask = decode_mask_png(*rec.mask_path);
    } catch (const Error&) {
      rec.iob = rec.iom = rec.freeseg_score = rec.drop_rate = 0.0;
      rec.kept = false;
      rec.reject_reason = "mask_load_error";
      finish();
      return;
    }
    const ScoredSegment s = rank_segments({in}, score_threshold, drop_threshold)[0];
    rec.iob = s.iob;
    rec.iom = s.iom;
    rec.freeseg_score = s.freeseg_score;
    rec.drop_rate = s.drop_rate;
    rec.kept = s.kept;
    if (s.kept)
      rec.reject_reason.reset();
    else
      rec.reject_reason = s.reject_reason;
    finish();
  });

  RunReport report;
  report.stage = "rank";
  report.records_in =
      static_cast<std::int64_t>(records.size() + input.diagnostics.size());
  if (!input.diagnostics.empty())
    report.rejects_by_reason["malformed_line"] =
        static_cast<std::int64_t>(input.diagnostics.size());

  std::map<int, std::pair<std::int64_t, std::int64_t>> per_class;  // collected, kept
  for (const ManifestRecord& rec : records) {
    auto& pc = per_class[rec.class_id];
    ++pc.first;
    if (rec.kept && *rec.kept) {
      ++report.records_out;
      ++report.per_class_counts[rec.class_id];
      ++pc.second;
    } else {
      const std::string reason =
          rec.reject_reason && !rec.reject_reason->empty() ? *rec.reject_reason : "rejected";
      ++report.rejects_by_reason[reason];
    }
  }

  write_candidate_manifest(records, (fs::path(out_dir) / "scored.jsonl").string());

  std::ostringstream table;
  table << std::left << std::setw(10) << "class" << std::right << std::setw(10) << "collected"
        << std::setw(8) << "kept" << "\n";
  std::int64_t total_in = 0, total_kept = 0;
  for (const auto& [cid, counts] : per_class) {
    table << std::left << std::setw(10) << cid << std::right << std::setw(10) << counts.first
          << std::setw(8) << counts.second << "\n";
    total_in += counts.first;
    total_kept += counts.second;
  }
  table << std::left << std::setw(10) << "total" << std::right << std::setw(10) << total_in
        << std::setw(8) << total_kept << "\n";
  write_text((fs::path(out_dir) / "class_summary.txt").string(), table.str());

  report.wall_time_sec = timer.seconds();
  write_report_json(report, (fs::path(out_dir) / "report_rank.json").string());
  return report;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

namespace {

std::vector<BackgroundSample> load_backgrounds(const CocoCatalog& catalog,
                                               const std::string& image_dir,
                                               std::vector<std::string>& diagnostics) {
  std::vector<BackgroundSample> out;
  for (const CocoImage& ci : catalog.images) {
    BackgroundSample bg;
    bg.id = ci.id;
    const std::string path = (fs::path(image_dir) / ci.file_name).string();
    try {
      bg.image = decode_image(path);
    } catch (const Error& e) {
      diagnostics.push_back(e.what());
      continue;
    }
    for (const CocoAnnotation& ann : catalog.annotations) {
      if (ann.image_id != ci.id) continue;
      BinaryMask mask;
      try {
        mask = rle_decode(ann.rle);
      } catch (const Error& e) {
        diagnostics.push_back("annotation " + std::to_string(ann.id) + ": " + e.what());
        continue;
      }
      if (mask.width != bg.image.width || mask.height != bg.image.height) {
        diagnostics.push_back("annotation " + std::to_string(ann.id) +
                              ": mask does not match image dimensions");
        continue;
      }
      const std::int64_t a = area(mask);
      if (a == 0) continue;
      SceneAnnotation sa;
      sa.class_id = ann.category_id;
      sa.box = bbox_of(mask);
      sa.mask = std::move(mask);
      sa.source = AnnotationSource::native;
      sa.visible_area = a;
      sa.original_area = a;
      bg.annotations.push_back(std::move(sa));
    }
    out.push_back(std::move(bg));
  }
  return out;
}

SegmentCatalog load_segments(const std::vector<ManifestRecord>& records,
                             const std::unordered_map<int, int>& class_map,
                             std::vector<std::string>& diagnostics) {
  SegmentCatalog catalog;
  for (const ManifestRecord& rec : records) {
    if (!rec.kept || !*rec.kept) continue;
    if (!rec.mask_path) {
      diagnostics.push_back("record " + rec.record_id + ": kept but has no mask_path");
      continue;
    }
    SegmentSample seg;
    seg.record_id = rec.record_id;
    const auto mapped = class_map.find(rec.class_id);
    seg.class_id = mapped != class_map.end() ? mapped->second : rec.class_id;
    try {
      seg.image = decode_image(rec.image_path);
      seg.mask = decode_mask_png(*rec.mask_path);
    } catch (const Error& e) {
      diagnostics.push_back(std::string("record ") + rec.record_id + ": " + e.what());
      continue;
    }
    if (seg.image.width != seg.mask.width || seg.image.height != seg.mask.height) {
      diagnostics.push_back("record " + rec.record_id +
                            ": image and mask dimensions differ");
      continue;
    }
    if (area(seg.mask) == 0) {
      diagnostics.push_back("record " + rec.record_id + ": mask is empty");
      continue;
    }
    catalog.samples.push_back(std::move(seg));
  }
  catalog.build_index();
  return catalog;
}

}  // namespace

RunReport run_synth(const std::string& backgrounds_json, const std::string& backgrounds_dir,
                    const std::string& segments_manifest, const PipelineConfig& config,
                    std::size_t count, const std::string& out_dir) {
  const Timer timer;
  config.synth.validate();

  const CocoCatalog bg_catalog = read_coco(backgrounds_json);
  for (const std::string& d : bg_catalog.diagnostics)
    std::fprintf(stderr, "[synth] %s: %s\n", backgrounds_json.c_str(), d.c_str());
  const std::string image_dir = backgrounds_dir.empty()
                                    ? fs::path(backgrounds_json).parent_path().string()
                                    : backgrounds_dir;

  std::vector<std::string> diagnostics;
  const std::vector<BackgroundSample> backgrounds =
      load_backgrounds(bg_catalog, image_dir, diagnostics);

  ManifestReadResult seg_input = read_candidate_manifest(segments_manifest);
  for (const std::string& d : seg_input.diagnostics)
    std::fprintf(stderr, "[synth] %s: %s\n", segments_manifest.c_str(), d.c_str());
  std::unordered_map<int, int> class_map;
  if (!config.io.class_map.empty()) class_map = read_class_map(config.io.class_map);
  const SegmentCatalog segments = load_segments(seg_input.records, class_map, diagnostics);
  for (const std::string& d : diagnostics)
    std::fprintf(stderr, "[synth] %s\n", d.c_str());

  if (backgrounds.empty()) throw Error("no usable background images");
  if (segments.samples.empty()) throw Error("no kept segments to paste");

  fs::create_directories(fs::path(out_dir) / "images");

  struct AnnOut {
    int class_id;
    RleMask rle;
    BoundingBox box;
    bool pasted;
    std::int64_t visible;
  };
  struct SceneOut {
    int width = 0, height = 0;
    int pastes_drawn = 0, pastes_applied = 0, slots_skipped = 0, dropped = 0;
    std::vector<AnnOut> annotations;
  };
  std::vector<SceneOut> scenes(count);
  std::atomic<std::size_t> done{0};

  synthesize(backgrounds, segments, config.synth, count, config.io.workers,
             [&](std::size_t i, SynthScene&& scene) {
               encode_png(scene.image, (fs::path(out_dir) / scene_file_name(i)).string());
               SceneOut& so = scenes[i];
               so.width = scene.image.width;
               so.height = scene.image.height;
               so.pastes_drawn = scene.pastes_drawn;
               so.pastes_applied = static_cast<int>(scene.paste_masks.size());
               so.slots_skipped = scene.paste_slots_skipped;
               so.dropped = scene.annotations_dropped;
               for (const SceneAnnotation& a : scene.annotations)
                 so.annotations.push_back({a.class_id, rle_encode(a.mask), a.box,
                                           a.source == AnnotationSource::pasted,
                                           a.visible_area});
               report_progress("synth", done.fetch_add(1) + 1, count);
             });

  // assemble COCO output in scene order; ids are deterministic
  CocoCatalog out_catalog;
  std::int64_t next_ann_id = 1;
  std::map<int, std::int64_t> per_class_pasted;
  std::int64_t pastes_drawn = 0, pastes_applied = 0, slots_skipped = 0, dropped = 0;
  std::int64_t native_out = 0, pasted_out = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const SceneOut& so = scenes[i];
    out_catalog.images.push_back({static_cast<std::int64_t>(i) + 1, scene_file_name(i),
                                  so.width, so.height});
    for (const AnnOut& a : so.annotations) {
      CocoAnnotation ca;
      ca.id = next_ann_id++;
      ca.image_id = static_cast<std::int64_t>(i) + 1;
      ca.category_id = a.class_id;
      ca.rle = a.rle;
      ca.box = a.box;
      ca.area = a.visible;
      ca.source = a.pasted ? "pasted" : "native";
      out_catalog.annotations.push_back(std::move(ca));
      if (a.pasted) {
        ++pasted_out;
        ++per_class_pasted[a.class_id];
      } else {
        ++native_out;
      }
    }
    pastes_drawn += so.pastes_drawn;
    pastes_applied += so.pastes_applied;
    slots_skipped += so.slots_skipped;
    dropped += so.dropped;
  }

  std::map<int, std::string> category_names;
  for (const CocoCategory& c : bg_catalog.categories) category_names[c.id] = c.name;
  for (const SegmentSample& s : segments.samples)
    if (!category_names.count(s.class_id))
      category_names[s.class_id] = "class_" + std::to_string(s.class_id);
  for (const auto& [cid, name] : category_names) out_catalog.categories.push_back({cid, name});

  write_coco(out_catalog, (fs::path(out_dir) / "annotations.json").string());

  ordered_json stats;
  stats["scenes"] = count;
  stats["pastes_drawn"] = pastes_drawn;
  stats["pastes_applied"] = pastes_applied;
  stats["paste_slots_skipped"] = slots_skipped;
  stats["annotations_dropped"] = dropped;
  stats["native_annotations_out"] = native_out;
  stats["pasted_annotations_out"] = pasted_out;
  stats["per_class_pasted"] = ordered_json::object();
  for (const auto& [cid, n] : per_class_pasted)
    stats["per_class_pasted"][std::to_string(cid)] = n;
  write_text((fs::path(out_dir) / "stats.json").string(), stats.dump(2) + "\n");

  RunReport report;
  report.stage = "synth";
  report.records_in = static_cast<std::int64_t>(count);
  report.records_out = static_cast<std::int64_t>(count);
  report.per_class_counts = per_class_pasted;
  report.wall_time_sec = timer.seconds();
  write_report_json(report, (fs::path(out_dir) / "report_synth.json").string());
  return report;
}

// ---------------------------------------------------------------------------
// viz
// ---------------------------------------------------------------------------

namespace {

bool looks_like_coco(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto parsed = ordered_json::parse(ss.str(), nullptr, false);
  return parsed.is_object() && parsed.contains("images");
}

}  // namespace

RunReport run_viz(const std::string& input_path, const std::string& image_dir,
                  std::int64_t limit, const std::string& out_dir) {
  const Timer timer;
  RunReport report;
  report.stage = "viz";
  fs::create_directories(out_dir);

  if (looks_like_coco(input_path)) {
    const CocoCatalog catalog = read_coco(input_path);
    const std::string dir =
        image_dir.empty() ? fs::path(input_path).parent_path().string() : image_dir;
    std::int64_t emitted = 0;
    for (const CocoImage& ci : catalog.images) {
      if (limit >= 0 && report.records_in >= limit) break;
      ++report.records_in;
      Image base;
      try {
        base = decode_image((fs::path(dir) / ci.file_name).string());
      } catch (const Error& e) {
        std::fprintf(stderr, "[viz] %s\n", e.what());
        ++report.rejects_by_reason["missing_image"];
        continue;
      }
      std::vector<OverlayItem> items;
      for (const CocoAnnotation& ann : catalog.annotations) {
        if (ann.image_id != ci.id) continue;
        OverlayItem item;
        item.mask = rle_decode(ann.rle);
        item.pasted = ann.source == "pasted";
        items.push_back(std::move(item));
      }
      try {
        const Image overlay = render_overlay(base, items);
        char name[64];
        std::snprintf(name, sizeof(name), "overlay_%lld.png",
                      static_cast<long long>(ci.id));
        encode_png(overlay, (fs::path(out_dir) / name).string());
        ++emitted;
      } catch (const Error& e) {
        std::fprintf(stderr, "[viz] image %lld: %s\n", static_cast<long long>(ci.id),
                     e.what());
        ++report.rejects_by_reason["overlay_error"];
      }
    }
    report.records_out = emitted;
  } else {
    const ManifestReadResult input = read_candidate_manifest(input_path);
    std::int64_t emitted = 0;
    for (std::size_t i = 0; i < input.records.size(); ++i) {
      if (limit >= 0 && report.records_in >= limit) break;
      ++report.records_in;
      const ManifestRecord& rec = input.records[i];
      Image base;
      try {
        base = decode_image(rec.image_path);
      } catch (const Error& e) {
        std::fprintf(stderr, "[viz] %s\n", e.what());
        ++report.rejects_by_reason["missing_image"];
        continue;
      }
      OverlayItem item;
      item.box = rec.box;
      item.has_box = true;
      item.pasted = true;  // segment proposals draw in the warm palette
      item.caption = viz_caption(rec);
      if (rec.mask_path) {
        try {
          item.mask = decode_mask_png(*rec.mask_path);
        } catch (const Error& e) {
          std::fprintf(stderr, "[viz] %s\n", e.what());
        }
      }
      try {
        const Image overlay = render_overlay(base, {item});
        char name[160];
        std::snprintf(name, sizeof(name), "%06zu_%s_overlay.png", i,
                      sanitize_id(rec.record_id).c_str());
        encode_png(overlay, (fs::path(out_dir) / name).string());
        ++emitted;
      } catch (const Error& e) {
        std::fprintf(stderr, "[viz] record %s: %s\n", rec.record_id.c_str(), e.what());
        ++report.rejects_by_reason["overlay_error"];
      }
    }
    report.records_out = emitted;
  }

  report.wall_time_sec = timer.seconds();
  write_report_json(report, (fs::path(out_dir) / "report_viz.json").string());
  return report;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

RunReport run_stats(const std::vector<std::string>& manifest_paths,
                    const std::string& out_dir, std::ostream& table) {
  const Timer timer;
  RunReport report;
  report.stage = "stats";

  struct FileCounts {
    std::string path;
    std::int64_t records = 0, kept = 0, rejected = 0;
  };
  std::vector<FileCounts> files;
  std::map<int, std::pair<std::int64_t, std::int64_t>> per_class;       // collected, kept
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_src; // collected, kept

  for (const std::string& path : manifest_paths) {
    const ManifestReadResult input = read_candidate_manifest(path);
    FileCounts fc;
    fc.path = path;
    if (!input.diagnostics.empty()) {
      report.rejects_by_reason["malformed_line"] +=
          static_cast<std::int64_t>(input.diagnostics.size());
      fc.records += static_cast<std::int64_t>(input.diagnostics.size());
      fc.rejected += static_cast<std::int64_t>(input.diagnostics.size());
    }
    for (const ManifestRecord& rec : input.records) {
      ++fc.records;
      const bool kept = rec.kept && *rec.kept;
      auto& pc = per_class[rec.class_id];
      auto& ps = per_src[rec.source_tag];
      ++pc.first;
      ++ps.first;
      if (kept) {
        ++fc.kept;
        ++pc.second;
        ++ps.second;
        ++report.records_out;
        ++report.per_class_counts[rec.class_id];
      } else {
        ++fc.rejected;
        std::string reason = "unscored";
        if (rec.reject_reason && !rec.reject_reason->empty())
          reason = *rec.reject_reason;
        else if (rec.kept)
          reason = "rejected";
        ++report.rejects_by_reason[reason];
      }
    }
    report.records_in += fc.records;
    files.push_back(std::move(fc));
  }

  std::ostringstream t;
  t << std::left << std::setw(40) << "manifest" << std::right << std::setw(10) << "records"
    << std::setw(8) << "kept" << std::setw(10) << "rejected" << "\n";
  std::int64_t tr = 0, tk = 0, tj = 0;
  for (const FileCounts& fc : files) {
    t << std::left << std::setw(40) << fc.path << std::right << std::setw(10) << fc.records
      << std::setw(8) << fc.kept << std::setw(10) << fc.rejected << "\n";
    tr += fc.records;
    tk += fc.kept;
    tj += fc.rejected;
  }
  t << std::left << std::setw(40) << "TOTAL" << std::right << std::setw(10) << tr
    << std::setw(8) << tk << std::setw(10) << tj << "\n";
  t << "\nby class:\n";
  t << std::left << std::setw(12) << "class" << std::right << std::setw(10) << "records"
    << std::setw(8) << "kept" << "\n";
  for (const auto& [cid, c] : per_class)
    t << std::left << std::setw(12) << cid << std::right << std::setw(10) << c.first
      << std::setw(8) << c.second << "\n";
  t << "\nby source:\n";
  t << std::left << std::setw(12) << "source" << std::right << std::setw(10) << "records"
    << std::setw(8) << "kept" << "\n";
  for (const auto& [src, c] : per_src)
    t << std::left << std::setw(12) << src << std::right << std::setw(10) << c.first
      << std::setw(8) << c.second << "\n";
  table << t.str();

  if (!out_dir.empty()) {
    ordered_json j;
    j["stage"] = "stats";
    j["manifests"] = ordered_json::array();
    for (const FileCounts& fc : files) {
      ordered_json f;
      f["path"] = fc.path;
      f["records"] = fc.records;
      f["kept"] = fc.kept;
      f["rejected"] = fc.rejected;
      j["manifests"].push_back(std::move(f));
    }
    j["records"] = tr;
    j["kept"] = tk;
    j["rejected"] = tj;
    j["per_class"] = ordered_json::object();
    for (const auto& [cid, c] : per_class)
      j["per_class"][std::to_string(cid)] = {{"records", c.first}, {"kept", c.second}};
    j["per_source"] = ordered_json::object();
    for (const auto& [src, c] : per_src)
      j["per_source"][src] = {{"records", c.first}, {"kept", c.second}};
    write_text((fs::path(out_dir) / "stats.json").string(), j.dump(2) + "\n");
  }

  report.wall_time_sec = timer.seconds();
  return report;
}

}  // namespace freeseg
