#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "freeseg/image.hpp"
#include "freeseg/mask.hpp"
#include "freeseg/rank.hpp"
#include "freeseg/refine.hpp"
#include "freeseg/synth.hpp"

namespace freeseg {

// ---------------------------------------------------------------------------
// Candidate / scored manifests (JSON lines, one record per line)
// ---------------------------------------------------------------------------

/// One object-centric image's bundle. The candidate fields are always
/// present; the optional fields are filled in by the refine and rank stages.
struct ManifestRecord {
  std::string record_id;
  int class_id = 0;
  std::string image_path;
  std::string raw_map_path;
  BoundingBox box;
  double conf_before = 0.0;
  double conf_after = 0.0;
  std::string source_tag = "other";  // imagenet | google | other

  std::optional<std::string> mask_path;
  std::optional<double> iob;
  std::optional<double> iom;
  std::optional<double> freeseg_score;
  std::optional<double> drop_rate;
  std::optional<bool> kept;
  std::optional<std::string> reject_reason;
};

struct ManifestReadResult {
  std::vector<ManifestRecord> records;       // valid lines, input order
  std::vector<std::string> diagnostics;      // "line N: ..." for malformed lines
};

/// Parses a JSONL manifest. Malformed lines become diagnostics; valid lines
/// are kept. An unreadable file throws.
ManifestReadResult read_candidate_manifest(const std::string& path);

/// Serializes records one per line with a fixed key order, so identical
/// inputs produce identical bytes. Floats are written with at most six
/// significant digits.
void write_candidate_manifest(const std::vector<ManifestRecord>& records,
                              const std::string& path);

/// Single serialized manifest line (no trailing newline).
std::string manifest_line(const ManifestRecord& record);

/// Shortest decimal form of v rounded to six significant digits.
std::string format_g6(double v);

// ---------------------------------------------------------------------------
// COCO-style annotation JSON
// ---------------------------------------------------------------------------

struct CocoImage {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
};

struct CocoAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  int category_id = 0;
  RleMask rle;
  BoundingBox box;
  std::int64_t area = 0;
  std::string source;  // "native"/"pasted" extension field; empty if absent
};

struct CocoCategory {
  int id = 0;
  std::string name;
};

struct CocoDocument;  // opaque passthrough of the original JSON

/// Parsed view of a COCO-style file. Catalogs returned by read_coco carry
/// the original document so unknown fields survive a write; catalogs built
/// by hand are serialized from the typed fields alone.
struct CocoCatalog {
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;
  std::vector<CocoCategory> categories;
  std::vector<std::string> diagnostics;  // per-annotation validation failures
  std::shared_ptr<const CocoDocument> doc;
};

/// Reads and validates a COCO-style file. Annotations whose RLE counts do
/// not sum to width*height are rejected with a diagnostic naming the
/// annotation id. Throws on unreadable or unparsable files.
CocoCatalog read_coco(const std::string& path);

/// Deterministic serialization; read-then-write preserves unknown fields.
void write_coco(const CocoCatalog& catalog, const std::string& path);

// ---------------------------------------------------------------------------
// Image files
// ---------------------------------------------------------------------------

/// Decodes PNG or JPEG into RGB. Throws Error naming the path on failure.
Image decode_image(const std::string& path);

/// Decodes PNG/PGM/JPEG into an 8-bit intensity map. Color inputs are
/// reduced by integer luma round((299 R + 587 G + 114 B) / 1000).
GrayMap decode_graymap(const std::string& path);

/// Mask stored as a bilevel PNG (0 / 255).
void encode_png(const BinaryMask& mask, const std::string& path);
BinaryMask decode_mask_png(const std::string& path);

void encode_png(const Image& image, const std::string& path);
void encode_png(const GrayMap& map, const std::string& path);

// ---------------------------------------------------------------------------
// Pipeline configuration
// ---------------------------------------------------------------------------

struct IoConfig {
  std::string out_dir = "out";
  std::string class_map;  // optional two-column class-id mapping file
  int workers = 1;
};

/// Two-column mapping file (source class id, output category id), whitespace
/// separated, '#' comments allowed. Throws on malformed lines.
std::unordered_map<int, int> read_class_map(const std::string& path);

/// Everything the pipeline stages need, loadable from one JSON document with
/// sections "refine", "rank", "synth", "io".
struct PipelineConfig {
  RefineConfig refine;
  PastePolicy synth;
  double score_threshold = 0.5;
  double drop_threshold = 0.5;
  IoConfig io;
};

/// Loads a config file; absent sections and fields keep their defaults.
/// Unknown keys throw so typos do not silently fall back to defaults.
PipelineConfig load_config(const std::string& path);

/// FREESEG_SEED overrides synth.seed; FREESEG_OUT_DIR overrides io.out_dir.
void apply_env_overrides(PipelineConfig& config);

}  // namespace freeseg
