#include "freeseg/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <opencv2/imgcodecs.hpp>

#include "freeseg/error.hpp"

namespace freeseg {

using ordered_json = nlohmann::ordered_json;

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

// Round through text so serialized floats carry at most six significant
// digits and reserialize identically.
double round_g6(double v) { return std::strtod(format_g6(v).c_str(), nullptr); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << contents;
  if (!out) throw Error("write failed: " + path);
}

const ordered_json& require_field(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

ManifestRecord parse_record(const ordered_json& j) {
  ManifestRecord r;
  r.record_id = require_field(j, "record_id").get<std::string>();
  r.class_id = require_field(j, "class_id").get<int>();
  r.image_path = require_field(j, "image_path").get<std::string>();
  r.raw_map_path = require_field(j, "raw_map_path").get<std::string>();
  const auto& box = require_field(j, "box");
  if (!box.is_array() || box.size() != 4) throw Error("field 'box' must be [x,y,w,h]");
  r.box = {box[0].get<int>(), box[1].get<int>(), box[2].get<int>(), box[3].get<int>()};
  if (r.box.w < 0 || r.box.h < 0) throw Error("field 'box' has negative extent");
  r.conf_before = require_field(j, "conf_before").get<double>();
  r.conf_after = require_field(j, "conf_after").get<double>();
  if (r.conf_before < 0 || r.conf_before > 1 || r.conf_after < 0 || r.conf_after > 1)
    throw Error("confidences must lie in [0,1]");
  r.source_tag = require_field(j, "source_tag").get<std::string>();
  if (r.source_tag != "imagenet" && r.source_tag != "google" && r.source_tag != "other")
    throw Error("invalid source_tag '" + r.source_tag + "'");

  if (j.contains("mask_path") && !j["mask_path"].is_null())
    r.mask_path = j["mask_path"].get<std::string>();
  if (j.contains("iob")) r.iob = j["iob"].get<double>();
  if (j.contains("iom")) r.iom = j["iom"].get<double>();
  if (j.contains("freeseg_score")) r.freeseg_score = j["freeseg_score"].get<double>();
  if (j.contains("drop_rate")) r.drop_rate = j["drop_rate"].get<double>();
  if (j.contains("kept")) r.kept = j["kept"].get<bool>();
  if (j.contains("reject_reason") && !j["reject_reason"].is_null())
    r.reject_reason = j["reject_reason"].get<std::string>();
  return r;
}

}  // namespace

ManifestReadResult read_candidate_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest: " + path);
  ManifestReadResult result;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const ordered_json j = ordered_json::parse(line);
      if (!j.is_object()) throw Error("line is not a JSON object");
      result.records.push_back(parse_record(j));
    } catch (const ordered_json::exception& e) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return result;
}

std::string manifest_line(const ManifestRecord& r) {
  ordered_json j;
  j["record_id"] = r.record_id;
  j["class_id"] = r.class_id;
  j["image_path"] = r.image_path;
  j["raw_map_path"] = r.raw_map_path;
  j["box"] = {r.box.x, r.box.y, r.box.w, r.box.h};
  j["conf_before"] = round_g6(r.conf_before);
  j["conf_after"] = round_g6(r.conf_after);
  j["source_tag"] = r.source_tag;
  if (r.mask_path) j["mask_path"] = *r.mask_path;
  if (r.iob) j["iob"] = round_g6(*r.iob);
  if (r.iom) j["iom"] = round_g6(*r.iom);
  if (r.freeseg_score) j["freeseg_score"] = round_g6(*r.freeseg_score);
  if (r.drop_rate) j["drop_rate"] = round_g6(*r.drop_rate);
  if (r.kept) j["kept"] = *r.kept;
  if (r.reject_reason) j["reject_reason"] = *r.reject_reason;
  return j.dump();
}

void write_candidate_manifest(const std::vector<ManifestRecord>& records,
                              const std::string& path) {
  std::string out;
  for (const ManifestRecord& r : records) {
    out += manifest_line(r);
    out += '\n';
  }
  write_file(path, out);
}

// ---------------------------------------------------------------------------
// COCO
// ---------------------------------------------------------------------------

struct CocoDocument {
  ordered_json json;
};

namespace {

RleMask parse_rle(const ordered_json& seg) {
  const auto& size = require_field(seg, "size");
  if (!size.is_array() || size.size() != 2) throw Error("segmentation size must be [h,w]");
  RleMask rle;
  rle.height = size[0].get<int>();
  rle.width = size[1].get<int>();
  for (const auto& c : require_field(seg, "counts")) rle.counts.push_back(c.get<std::uint32_t>());
  return rle;
}

CocoAnnotation parse_annotation(const ordered_json& j) {
  CocoAnnotation a;
  a.id = require_field(j, "id").get<std::int64_t>();
  a.image_id = require_field(j, "image_id").get<std::int64_t>();
  a.category_id = require_field(j, "category_id").get<int>();
  const auto& seg = require_field(j, "segmentation");
  if (!seg.is_object()) throw Error("only RLE segmentation objects are supported");
  a.rle = parse_rle(seg);
  const std::int64_t total = static_cast<std::int64_t>(a.rle.width) * a.rle.height;
  std::int64_t sum = 0;
  for (std::uint32_t c : a.rle.counts) sum += c;
  if (sum != total)
    throw Error("RLE counts sum " + std::to_string(sum) + " != " + std::to_string(a.rle.width) +
                "x" + std::to_string(a.rle.height));
  const auto& box = require_field(j, "bbox");
  if (!box.is_array() || box.size() != 4) throw Error("bbox must be [x,y,w,h]");
  a.box = {static_cast<int>(std::llround(box[0].get<double>())),
           static_cast<int>(std::llround(box[1].get<double>())),
           static_cast<int>(std::llround(box[2].get<double>())),
           static_cast<int>(std::llround(box[3].get<double>()))};
  a.area = static_cast<std::int64_t>(std::llround(require_field(j, "area").get<double>()));
  if (j.contains("source")) a.source = j["source"].get<std::string>();
  return a;
}

ordered_json annotation_to_json(const CocoAnnotation& a) {
  ordered_json j;
  j["id"] = a.id;
  j["image_id"] = a.image_id;
  j["category_id"] = a.category_id;
  j["segmentation"] = {{"size", {a.rle.height, a.rle.width}}, {"counts", a.rle.counts}};
  j["bbox"] = {a.box.x, a.box.y, a.box.w, a.box.h};
  j["area"] = a.area;
  if (!a.source.empty()) j["source"] = a.source;
  return j;
}

}  // namespace

CocoCatalog read_coco(const std::string& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(path));
  } catch (const ordered_json::exception& e) {
    throw Error("cannot parse COCO file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw Error("COCO file is not a JSON object: " + path);

  CocoCatalog catalog;
  if (doc.contains("images")) {
    for (const auto& j : doc["images"]) {
      CocoImage img;
      img.id = require_field(j, "id").get<std::int64_t>();
      img.file_name = require_field(j, "file_name").get<std::string>();
      img.width = require_field(j, "width").get<int>();
      img.height = require_field(j, "height").get<int>();
      catalog.images.push_back(std::move(img));
    }
  }
  if (doc.contains("categories")) {
    for (const auto& j : doc["categories"]) {
      CocoCategory c;
      c.id = require_field(j, "id").get<int>();
      c.name = j.contains("name") ? j["name"].get<std::string>() : "";
      catalog.categories.push_back(std::move(c));
    }
  }
  if (doc.contains("annotations")) {
    ordered_json kept_raw = ordered_json::array();
    for (const auto& j : doc["annotations"]) {
      try {
        catalog.annotations.push_back(parse_annotation(j));
        kept_raw.push_back(j);
      } catch (const Error& e) {
        const std::string id =
            j.is_object() && j.contains("id") ? j["id"].dump() : "<no id>";
        catalog.diagnostics.push_back("annotation " + id + ": " + e.what());
      } catch (const ordered_json::exception& e) {
        const std::string id =
            j.is_object() && j.contains("id") ? j["id"].dump() : "<no id>";
        catalog.diagnostics.push_back("annotation " + id + ": " + e.what());
      }
    }
    doc["annotations"] = std::move(kept_raw);
  }

  auto holder = std::make_shared<CocoDocument>();
  holder->json = std::move(doc);
  catalog.doc = std::move(holder);
  return catalog;
}

void write_coco(const CocoCatalog& catalog, const std::string& path) {
  if (catalog.doc) {
    write_file(path, catalog.doc->json.dump() + "\n");
    return;
  }
  ordered_json doc;
  doc["images"] = ordered_json::array();
  for (const CocoImage& img : catalog.images) {
    ordered_json j;
    j["id"] = img.id;
    j["file_name"] = img.file_name;
    j["width"] = img.width;
    j["height"] = img.height;
    doc["images"].push_back(std::move(j));
  }
  doc["annotations"] = ordered_json::array();
  for (const CocoAnnotation& a : catalog.annotations)
    doc["annotations"].push_back(annotation_to_json(a));
  doc["categories"] = ordered_json::array();
  for (const CocoCategory& c : catalog.categories) {
    ordered_json j;
    j["id"] = c.id;
    j["name"] = c.name;
    doc["categories"].push_back(std::move(j));
  }
  write_file(path, doc.dump() + "\n");
}

// ---------------------------------------------------------------------------
// Image files (OpenCV imgcodecs behind the interface)
// ---------------------------------------------------------------------------

Image decode_image(const std::string& path) {
  const cv::Mat mat = cv::imread(path, cv::IMREAD_COLOR);
  if (mat.empty()) throw Error("cannot decode image: " + path);
  Image img;
  img.width = mat.cols;
  img.height = mat.rows;
  img.rgb.resize(3 * static_cast<std::size_t>(mat.cols) * mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < mat.cols; ++x)
      img.set(x, y, row[x][2], row[x][1], row[x][0]);  // BGR -> RGB
  }
  return img;
}

GrayMap decode_graymap(const std::string& path) {
  const cv::Mat mat = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw Error("cannot decode gray map: " + path);
  if (mat.depth() != CV_8U)
    throw Error("gray map must be 8-bit: " + path);
  GrayMap map;
  map.width = mat.cols;
  map.height = mat.rows;
  map.data.resize(static_cast<std::size_t>(mat.cols) * mat.rows);
  if (mat.channels() == 1) {
    for (int y = 0; y < mat.rows; ++y) {
      const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
      for (int x = 0; x < mat.cols; ++x) map.at(x, y) = row[x];
    }
  } else if (mat.channels() == 3 || mat.channels() == 4) {
    for (int y = 0; y < mat.rows; ++y) {
      for (int x = 0; x < mat.cols; ++x) {
        const cv::Vec3b px = mat.channels() == 3
                                 ? mat.at<cv::Vec3b>(y, x)
                                 : cv::Vec3b(mat.at<cv::Vec4b>(y, x)[0],
                                             mat.at<cv::Vec4b>(y, x)[1],
                                             mat.at<cv::Vec4b>(y, x)[2]);
        const int luma = (299 * px[2] + 587 * px[1] + 114 * px[0] + 500) / 1000;
        map.at(x, y) = static_cast<std::uint8_t>(luma);
      }
    }
  } else {
    throw Error("unsupported channel count in gray map: " + path);
  }
  return map;
}

void encode_png(const BinaryMask& mask, const std::string& path) {
  validate(mask);
  cv::Mat mat(mask.height, mask.width, CV_8UC1);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      mat.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  if (!cv::imwrite(path, mat, {cv::IMWRITE_PNG_BILEVEL, 1}))
    throw Error("cannot write mask PNG: " + path);
}

BinaryMask decode_mask_png(const std::string& path) {
  const cv::Mat mat = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (mat.empty()) throw Error("cannot decode mask PNG: " + path);
  BinaryMask mask = BinaryMask::zeros(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) mask.set(x, y, row[x] >= 128);
  }
  return mask;
}

void encode_png(const GrayMap& map, const std::string& path) {
  validate(map);
  cv::Mat mat(map.height, map.width, CV_8UC1);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) mat.at<std::uint8_t>(y, x) = map.at(x, y);
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  if (!cv::imwrite(path, mat)) throw Error("cannot write PNG: " + path);
}

void encode_png(const Image& image, const std::string& path) {
  validate(image);
  cv::Mat mat(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width; ++x) {
      const auto p = image.at(x, y);
      row[x] = cv::Vec3b(p[2], p[1], p[0]);  // RGB -> BGR
    }
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  if (!cv::imwrite(path, mat)) throw Error("cannot write PNG: " + path);
}

// ---------------------------------------------------------------------------
// Pipeline config
// ---------------------------------------------------------------------------

namespace {

void check_known_keys(const ordered_json& section, const char* name,
                      std::initializer_list<const char*> known) {
  for (const auto& [key, _] : section.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw Error(std::string("config: unknown key '") + key + "' in section '" +
                         name + "'");
  }
}

template <typename T>
void assign_if(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

void load_refine_section(const ordered_json& j, RefineConfig& cfg) {
  check_known_keys(j, "refine",
                   {"gaussian_sigma", "gaussian_radius", "morph_kernel", "morph_order",
                    "li_tolerance", "li_max_iters", "connectivity"});
  assign_if(j, "gaussian_sigma", cfg.gaussian_sigma);
  assign_if(j, "gaussian_radius", cfg.gaussian_radius);
  assign_if(j, "morph_kernel", cfg.morph_kernel);
  if (j.contains("morph_order")) {
    const auto v = j["morph_order"].get<std::string>();
    if (v == "open_then_close")
      cfg.morph_order = MorphOrder::open_then_close;
    else if (v == "close_then_open")
      cfg.morph_order = MorphOrder::close_then_open;
    else
      throw Error("config: invalid morph_order '" + v + "'");
  }
  assign_if(j, "li_tolerance", cfg.li_tolerance);
  assign_if(j, "li_max_iters", cfg.li_max_iters);
  if (j.contains("connectivity")) {
    const auto v = j["connectivity"].get<std::string>();
    if (v == "four")
      cfg.connectivity = Connectivity::four;
    else if (v == "eight")
      cfg.connectivity = Connectivity::eight;
    else
      throw Error("config: invalid connectivity '" + v + "'");
  }
}

void load_synth_section(const ordered_json& j, PastePolicy& policy) {
  check_known_keys(j, "synth",
                   {"n_min", "n_max", "paste_flip_prob", "paste_scale_min", "paste_scale_max",
                    "bg_shortest_edges", "bg_max_size", "bg_flip_prob", "min_visible_fraction",
                    "min_visible_pixels", "class_balanced", "paste_max_attempts", "seed"});
  assign_if(j, "n_min", policy.n_min);
  assign_if(j, "n_max", policy.n_max);
  assign_if(j, "paste_flip_prob", policy.paste_flip_prob);
  assign_if(j, "paste_scale_min", policy.paste_scale_min);
  assign_if(j, "paste_scale_max", policy.paste_scale_max);
  assign_if(j, "bg_shortest_edges", policy.bg_shortest_edges);
  assign_if(j, "bg_max_size", policy.bg_max_size);
  assign_if(j, "bg_flip_prob", policy.bg_flip_prob);
  assign_if(j, "min_visible_fraction", policy.min_visible_fraction);
  assign_if(j, "min_visible_pixels", policy.min_visible_pixels);
  assign_if(j, "class_balanced", policy.class_balanced);
  assign_if(j, "paste_max_attempts", policy.paste_max_attempts);
  assign_if(j, "seed", policy.seed);
}

}  // namespace

std::unordered_map<int, int> read_class_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open class map: " + path);
  std::unordered_map<int, int> map;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int src = 0, dst = 0;
    if (!(ss >> src)) continue;  // blank or comment-only line
    std::string trailing;
    if (!(ss >> dst) || (ss >> trailing))
      throw Error("class map " + path + " line " + std::to_string(line_no) +
                  ": expected two integer columns");
    map[src] = dst;
  }
  return map;
}

PipelineConfig load_config(const std::string& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(path));
  } catch (const ordered_json::exception& e) {
    throw Error("cannot parse config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw Error("config is not a JSON object: " + path);
  check_known_keys(doc, "<root>", {"refine", "rank", "synth", "io"});

  PipelineConfig config;
  try {
    if (doc.contains("refine")) load_refine_section(doc["refine"], config.refine);
    if (doc.contains("rank")) {
      check_known_keys(doc["rank"], "rank", {"score_threshold", "drop_threshold"});
      assign_if(doc["rank"], "score_threshold", config.score_threshold);
      assign_if(doc["rank"], "drop_threshold", config.drop_threshold);
    }
    if (doc.contains("synth")) load_synth_section(doc["synth"], config.synth);
    if (doc.contains("io")) {
      check_known_keys(doc["io"], "io", {"out_dir", "class_map", "workers"});
      assign_if(doc["io"], "out_dir", config.io.out_dir);
      assign_if(doc["io"], "class_map", config.io.class_map);
      assign_if(doc["io"], "workers", config.io.workers);
    }
  } catch (const ordered_json::exception& e) {
    throw Error("config " + path + ": " + e.what());
  }
  config.refine.validate();
  config.synth.validate();
  if (config.score_threshold < 0 || config.score_threshold > 1 || config.drop_threshold < 0 ||
      config.drop_threshold > 1)
    throw Error("config: rank thresholds must lie in [0,1]");
  if (config.io.workers < 1) throw Error("config: io.workers must be >= 1");
  return config;
}

void apply_env_overrides(PipelineConfig& config) {
  if (const char* seed = std::getenv("FREESEG_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(seed, &end, 10);
    if (end == seed || *end != '\0') throw Error("FREESEG_SEED is not an integer");
    config.synth.seed = v;
  }
  if (const char* out = std::getenv("FREESEG_OUT_DIR")) config.io.out_dir = out;
}

}  // namespace freeseg
