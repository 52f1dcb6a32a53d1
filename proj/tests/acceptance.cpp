// Acceptance suite: prints one [PASS]/[FAIL] line per criterion.
// Run with no arguments for all criteria, or a single number for one.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freeseg/error.hpp"
#include "freeseg/io.hpp"
#include "freeseg/pipeline.hpp"
#include "freeseg/rank.hpp"
#include "freeseg/refine.hpp"
#include "freeseg/rng.hpp"
#include "freeseg/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace freeseg;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --------------------------------------------------------------------------
// 1. RLE codec: exhaustive <=3x3 plus 10,000 random masks up to 64x64, < 5 s
// --------------------------------------------------------------------------
void criterion_rle() {
  const auto t0 = std::chrono::steady_clock::now();
  for (int w = 0; w <= 3; ++w)
    for (int h = 0; h <= 3; ++h) {
      const int n = w * h;
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        BinaryMask m = BinaryMask::zeros(w, h);
        for (int i = 0; i < n; ++i) m.bits[i] = (bits >> i) & 1;
        require(rle_decode(rle_encode(m)) == m, "exhaustive round trip mismatch");
      }
    }
  Rng rng(0xACCE55);
  for (int iter = 0; iter < 10000; ++iter) {
    const int w = 1 + static_cast<int>(rng.uniform_index(64));
    const int h = 1 + static_cast<int>(rng.uniform_index(64));
    const BinaryMask m = test::random_mask(rng, w, h, rng.uniform_real(0.02, 0.98));
    require(rle_decode(rle_encode(m)) == m, "random round trip mismatch");
  }
  const double elapsed = seconds_since(t0);
  require(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
}

// --------------------------------------------------------------------------
// 2. Li threshold vs brute-force cross-entropy minimizer; 50/200 fixture
// --------------------------------------------------------------------------
void criterion_li() {
  Rng rng(0x11);
  for (int iter = 0; iter < 1000; ++iter) {
    const int a = static_cast<int>(rng.uniform_index(255));
    const int b = a + 1 + static_cast<int>(rng.uniform_index(255 - a));
    GrayMap map = GrayMap::filled(16, 16, static_cast<std::uint8_t>(a));
    const int nb = 1 + static_cast<int>(rng.uniform_index(255));
    for (int i = 0; i < nb; ++i) map.data[i] = static_cast<std::uint8_t>(b);
    const double t = li_threshold(map, 0.5, 100);
    const auto plateau = oracle::li_bruteforce(map);
    const double dist =
        t < plateau.lo ? plateau.lo - t : (t > plateau.hi ? t - plateau.hi : 0.0);
    require(dist <= 1.0, "iterative threshold " + std::to_string(t) + " off plateau [" +
                             std::to_string(plateau.lo) + "," + std::to_string(plateau.hi) +
                             "] for levels " + std::to_string(a) + "/" + std::to_string(b));
  }
  GrayMap fixture = GrayMap::filled(10, 10, 50);
  for (int i = 50; i < 100; ++i) fixture.data[i] = 200;
  const double t = li_threshold(fixture, 0.5, 100);
  require(std::abs(t - 108.2) <= 0.5,
          "50/200 fixture threshold " + std::to_string(t) + " not 108.2 +- 0.5");
}

// --------------------------------------------------------------------------
// 3. Morphology and largest component vs naive per-pixel oracle
// --------------------------------------------------------------------------
void criterion_morphology() {
  Rng rng(0x33);
  for (int iter = 0; iter < 1000; ++iter) {
    const int w = 1 + static_cast<int>(rng.uniform_index(32));
    const int h = 1 + static_cast<int>(rng.uniform_index(32));
    const int k = static_cast<int>(rng.uniform_index(3));
    const BinaryMask m = test::random_mask(rng, w, h, rng.uniform_real(0.2, 0.8));
    require(erode(m, k) == oracle::morph(m, k, true), "erode mismatch");
    require(dilate(m, k) == oracle::morph(m, k, false), "dilate mismatch");
    require(largest_connected_component(m, Connectivity::eight) ==
                oracle::largest_component(m, true),
            "largest component mismatch (eight)");
    require(largest_connected_component(m, Connectivity::four) ==
                oracle::largest_component(m, false),
            "largest component mismatch (four)");
  }
}

// --------------------------------------------------------------------------
// 4. Refinement end to end on 200 synthetic noisy disks
// --------------------------------------------------------------------------
void criterion_refine() {
  Rng rng(0x44);
  const RefineConfig cfg;
  double iou_sum = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double radius = rng.uniform_real(32.0, 52.0);
    const double cx = 80.0 + rng.uniform_real(-6.0, 6.0);
    const double cy = 80.0 + rng.uniform_real(-6.0, 6.0);
    const BinaryMask truth = test::disk_mask(160, 160, cx, cy, radius);
    const GrayMap map = test::noisy_disk_map(truth, 220, 30, 10, rng);
    const BinaryMask out = refine_segment(map, cfg);
    iou_sum += test::mask_iou(out, truth);
    require(out == largest_connected_component(out, cfg.connectivity),
            "output has more than one connected component");
  }
  const double mean_iou = iou_sum / 200.0;
  require(mean_iou >= 0.95, "mean IoU " + std::to_string(mean_iou) + " below 0.95");
}

// --------------------------------------------------------------------------
// 5. Overlap metrics vs brute force; wine-glass fixture
// --------------------------------------------------------------------------
void criterion_metrics() {
  Rng rng(0x55);
  for (int iter = 0; iter < 1000; ++iter) {
    const int w = 1 + static_cast<int>(rng.uniform_index(32));
    const int h = 1 + static_cast<int>(rng.uniform_index(32));
    const BinaryMask m = test::random_mask(rng, w, h, rng.uniform_real(0.05, 0.95));
    const BoundingBox box{static_cast<int>(rng.uniform_int(-3, w)),
                          static_cast<int>(rng.uniform_int(-3, h)),
                          static_cast<int>(rng.uniform_index(w + 6)),
                          static_cast<int>(rng.uniform_index(h + 6))};
    const BoundingBox cb = clamp_to(box, w, h);
    const std::int64_t inter = oracle::count_overlap(m, cb);
    const std::int64_t am = area(m), ab = cb.rect_area();
    const double e_iou =
        (am + ab - inter) == 0 ? 0.0 : static_cast<double>(inter) / (am + ab - inter);
    const double e_iob = ab == 0 ? 0.0 : static_cast<double>(inter) / ab;
    const double e_iom = am == 0 ? 0.0 : static_cast<double>(inter) / am;
    require(iou(m, box) == e_iou, "iou mismatch");
    require(iob(m, box) == e_iob, "iob mismatch");
    require(iom(m, box) == e_iom, "iom mismatch");
    require(freeseg_score(m, box) == (iob(m, box) + iom(m, box)) / 2.0,
            "freeseg_score is not the exact mean of iob and iom");
  }
  BinaryMask stem = BinaryMask::zeros(100, 100);
  for (int y = 10; y < 90; ++y)
    for (int x = 48; x < 52; ++x) stem.set(x, y, true);
  const BoundingBox box{30, 10, 40, 80};
  require(freeseg_score(stem, box) >= 0.5, "wine-glass fixture score below 0.5");
  require(iou(stem, box) < 0.5, "wine-glass fixture iou not below 0.5");
}

// --------------------------------------------------------------------------
// 6. Ranking: fixture pool at the default thresholds; filter monotonicity grid
// --------------------------------------------------------------------------
void criterion_ranking() {
  const BinaryMask block = [] {
    BinaryMask m = BinaryMask::zeros(6, 4);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 4; ++x) m.set(x, y, true);
    return m;
  }();
  const BoundingBox box{1, 0, 3, 4};
  const BinaryMask block10 = [] {
    BinaryMask m = BinaryMask::zeros(10, 10);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 4; ++x) m.set(x, y, true);
    return m;
  }();
  const std::vector<RankInput> pool = {
      {"a", 1, block, box, {0.9, 0.09}},                    // 0.625 / 0.9
      {"b", 1, block, box, {0.5, 0.3}},                     // 0.625 / 0.4
      {"c", 2, block10, BoundingBox{1, 0, 6, 4}, {0.9, 0.09}},  // exactly 0.5 / 0.9
  };
  const auto scored = rank_segments(pool, 0.5, 0.5);
  int kept = 0;
  for (const auto& s : scored) kept += s.kept;
  require(kept == 1 && scored[0].kept, "fixture pool must keep exactly the first record");

  // random pool; kept set must shrink as either threshold rises
  Rng rng(0x66);
  std::vector<RankInput> big;
  for (int i = 0; i < 60; ++i) {
    const int w = 8 + static_cast<int>(rng.uniform_index(24));
    const int h = 8 + static_cast<int>(rng.uniform_index(24));
    RankInput in;
    in.record_id = std::to_string(i);
    in.class_id = static_cast<int>(rng.uniform_index(5));
    in.mask = test::random_mask(rng, w, h, rng.uniform_real(0.1, 0.9));
    in.box = {static_cast<int>(rng.uniform_index(w / 2)),
              static_cast<int>(rng.uniform_index(h / 2)),
              1 + static_cast<int>(rng.uniform_index(w)),
              1 + static_cast<int>(rng.uniform_index(h))};
    in.conf.before = rng.uniform_real(0.05, 1.0);
    in.conf.after = rng.uniform_real(0.0, 1.0);
    big.push_back(std::move(in));
  }
  const int steps = 20;
  std::vector<std::set<int>> kept_sets(steps * steps);
  for (int si = 0; si < steps; ++si)
    for (int di = 0; di < steps; ++di) {
      const auto out =
          rank_segments(big, si / double(steps - 1), di / double(steps - 1));
      auto& set = kept_sets[si * steps + di];
      for (int i = 0; i < static_cast<int>(out.size()); ++i)
        if (out[i].kept) set.insert(i);
    }
  require(!kept_sets[0].empty(), "monotonicity grid needs a non-empty base kept set");
  for (int si = 0; si < steps; ++si)
    for (int di = 0; di < steps; ++di) {
      const auto& here = kept_sets[si * steps + di];
      if (si + 1 < steps)
        for (int id : kept_sets[(si + 1) * steps + di])
          require(here.count(id), "kept set grew when the score threshold rose");
      if (di + 1 < steps)
        for (int id : kept_sets[si * steps + di + 1])
          require(here.count(id), "kept set grew when the drop threshold rose");
    }
}

// --------------------------------------------------------------------------
// 7. Synthesis: 1000 scenes, policy defaults, 512x512 fixtures
// --------------------------------------------------------------------------
struct SceneAudit {
  std::uint64_t hash = 0;
  int pastes_drawn = 0;
  int pastes_applied = 0;
  int slots_skipped = 0;
};

// word-at-a-time mix so hashing 1000 full scenes stays cheap
std::uint64_t mix_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    std::uint64_t word;
    std::memcpy(&word, p + i, 8);
    h = (h ^ word) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
  }
  for (; i < n; ++i) h = (h ^ p[i]) * 0x100000001B3ULL;
  return h;
}

std::uint64_t scene_hash(const SynthScene& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = mix_bytes(h, s.image.rgb.data(), s.image.rgb.size());
  for (const auto& a : s.annotations) {
    h = mix_bytes(h, a.mask.bits.data(), a.mask.bits.size());
    h = mix_bytes(h, &a.box, sizeof(a.box));
    h = mix_bytes(h, &a.class_id, sizeof(a.class_id));
    h = mix_bytes(h, &a.visible_area, sizeof(a.visible_area));
  }
  return h;
}

void audit_scene(const SynthScene& s, const PastePolicy& policy) {
  for (const auto& a : s.annotations) {
    require(a.box == bbox_of(a.mask), "annotation box is not bbox_of(mask)");
    require(a.visible_area == area(a.mask), "cached visible_area is stale");
    require(a.visible_area <= a.original_area, "annotation gained pixels");
  }
  // last-paste-wins attribution over the recorded paste masks
  const int w = s.image.width, h = s.image.height;
  std::vector<int> attr(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t p = 0; p < s.paste_masks.size(); ++p)
    for (std::size_t i = 0; i < attr.size(); ++i)
      if (s.paste_masks[p].bits[i]) attr[i] = static_cast<int>(p);
  std::vector<const SceneAnnotation*> by_paste(s.paste_masks.size(), nullptr);
  for (const auto& a : s.annotations)
    if (a.source == AnnotationSource::pasted) by_paste.at(a.paste_index) = &a;
  for (std::size_t p = 0; p < s.paste_masks.size(); ++p) {
    BinaryMask expected = BinaryMask::zeros(w, h);
    for (std::size_t i = 0; i < attr.size(); ++i)
      expected.bits[i] = attr[i] == static_cast<int>(p) ? 1 : 0;
    if (by_paste[p]) {
      require(by_paste[p]->mask == expected, "pixel conservation violated");
    } else {
      const std::int64_t left = area(expected);
      const bool below = left < policy.min_visible_pixels ||
                         static_cast<double>(left) <
                             policy.min_visible_fraction *
                                 static_cast<double>(area(s.paste_masks[p]));
      require(below, "pasted annotation dropped while still visible");
    }
  }
}

void criterion_synthesis() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng fix_rng(0x77);
  std::vector<BackgroundSample> backgrounds;
  for (int i = 0; i < 3; ++i) {
    BackgroundSample bg;
    bg.id = i + 1;
    bg.image = test::random_image(fix_rng, 512, 512);
    for (int j = 0; j < 2; ++j) {
      SceneAnnotation a;
      a.class_id = 100 + j;
      a.mask = test::disk_mask(512, 512, 130.0 + 200 * j, 150.0 + 120 * j, 70.0);
      a.box = bbox_of(a.mask);
      a.visible_area = a.original_area = area(a.mask);
      bg.annotations.push_back(std::move(a));
    }
    backgrounds.push_back(std::move(bg));
  }
  SegmentCatalog segments;
  for (int i = 0; i < 6; ++i) {
    SegmentSample seg;
    seg.record_id = "seg" + std::to_string(i);
    seg.class_id = i % 3;
    seg.image = test::random_image(fix_rng, 256, 256);
    seg.mask = test::disk_mask(256, 256, 128.0, 128.0, 80.0);
    segments.samples.push_back(std::move(seg));
  }
  segments.build_index();

  PastePolicy policy;  // stock defaults
  policy.seed = 0x5EED;
  const std::size_t count = 1000;

  std::vector<SceneAudit> primary(count);
  std::atomic<std::int64_t> drawn{0}, applied{0}, skipped{0};
  synthesize(backgrounds, segments, policy, count, 2, [&](std::size_t i, SynthScene&& s) {
    audit_scene(s, policy);
    primary[i].hash = scene_hash(s);
    primary[i].pastes_drawn = s.pastes_drawn;
    primary[i].pastes_applied = static_cast<int>(s.paste_masks.size());
    primary[i].slots_skipped = s.paste_slots_skipped;
    drawn += s.pastes_drawn;
    applied += static_cast<int>(s.paste_masks.size());
    skipped += s.paste_slots_skipped;
  });

  const double mean_applied = static_cast<double>(applied.load()) / count;
  require(skipped.load() == 0, "paste slots were skipped on benign fixtures");
  require(mean_applied >= 3.4 && mean_applied <= 3.6,
          "mean pastes per scene " + std::to_string(mean_applied) + " outside [3.4, 3.6]");

  // reruns at other worker counts must reproduce every scene bit for bit
  for (int workers : {1, 4}) {
    std::vector<std::uint64_t> hashes(count);
    synthesize(backgrounds, segments, policy, count, workers,
               [&](std::size_t i, SynthScene&& s) { hashes[i] = scene_hash(s); });
    for (std::size_t i = 0; i < count; ++i)
      require(hashes[i] == primary[i].hash,
              "scene " + std::to_string(i) + " differs at workers=" +
                  std::to_string(workers));
  }

  const double elapsed = seconds_since(t0);
  require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s exceeds 2 min");
}

// --------------------------------------------------------------------------
// 8. cmd_synth COCO output parses, round-trips, and has consistent RLEs
// --------------------------------------------------------------------------
void criterion_coco_output() {
  test::TempDir dir("acceptance_coco");
  Rng rng(0x88);

  // candidate fixture -> refine -> rank -> synth through the command layer
  const BinaryMask disk = test::disk_mask(64, 64, 31.5, 31.5, 18.0);
  encode_png(test::noisy_disk_map(disk, 220, 30, 10, rng), dir.str("maps/m0.png"));
  encode_png(test::random_image(rng, 64, 64), dir.str("imgs/i0.png"));
  ManifestRecord rec;
  rec.record_id = "r0";
  rec.class_id = 12;
  rec.image_path = dir.str("imgs/i0.png");
  rec.raw_map_path = dir.str("maps/m0.png");
  rec.box = {13, 13, 37, 37};
  rec.conf_before = 0.9;
  rec.conf_after = 0.05;
  rec.source_tag = "google";
  write_candidate_manifest({rec}, dir.str("candidates.jsonl"));

  CocoCatalog bgs;
  encode_png(test::random_image(rng, 96, 96), dir.str("bg/bg0.png"));
  bgs.images.push_back({1, "bg0.png", 96, 96});
  const BinaryMask nm = test::disk_mask(96, 96, 40.0, 40.0, 16.0);
  bgs.annotations.push_back({1, 1, 3, rle_encode(nm), bbox_of(nm), area(nm), ""});
  bgs.categories.push_back({3, "native_thing"});
  write_coco(bgs, dir.str("bg/backgrounds.json"));

  PipelineConfig config;
  config.synth.seed = 424242;
  config.synth.bg_shortest_edges = {96, 128};
  config.synth.bg_max_size = 256;
  run_refine(dir.str("candidates.jsonl"), config, dir.str("refine"));
  run_rank(dir.str("refine/refined.jsonl"), 0.5, 0.5, 1, dir.str("rank"));
  run_synth(dir.str("bg/backgrounds.json"), "", dir.str("rank/scored.jsonl"), config, 5,
            dir.str("synth"));

  const CocoCatalog out = read_coco(dir.str("synth/annotations.json"));
  require(out.diagnostics.empty(), "synth output produced validation diagnostics");
  require(out.images.size() == 5, "expected 5 image entries");
  require(!out.annotations.empty(), "expected annotations");
  for (const auto& ann : out.annotations) {
    std::int64_t sum = 0;
    for (std::uint32_t c : ann.rle.counts) sum += c;
    require(sum == static_cast<std::int64_t>(ann.rle.width) * ann.rle.height,
            "RLE counts do not sum to width*height");
  }
  // lossless round trip: write(read(x)) is a fixed point
  write_coco(out, dir.str("rt1.json"));
  write_coco(read_coco(dir.str("rt1.json")), dir.str("rt2.json"));
  std::ifstream a(dir.str("rt1.json"), std::ios::binary), b(dir.str("rt2.json"), std::ios::binary);
  std::ostringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  require(sa.str() == sb.str() && !sa.str().empty(), "COCO round trip not lossless");
}

// --------------------------------------------------------------------------
// 9. Background transform arithmetic fixtures
// --------------------------------------------------------------------------
void criterion_background_arithmetic() {
  PastePolicy policy;
  policy.bg_flip_prob = 0.0;

  policy.bg_shortest_edges = {640};
  Rng r1(1);
  const Image small = Image::filled(800, 600, 1, 2, 3);
  const auto uncapped = transform_background(small, {}, policy, r1);
  require(uncapped.image.width == 853 && uncapped.image.height == 640,
          "800x600 with edge 640 must give 853x640, got " +
              std::to_string(uncapped.image.width) + "x" +
              std::to_string(uncapped.image.height));

  policy.bg_shortest_edges = {800};
  Rng r2(1);
  const Image wide = Image::filled(4000, 1000, 1, 2, 3);
  const auto capped = transform_background(wide, {}, policy, r2);
  require(capped.image.width == 1333 && capped.image.height == 333,
          "4000x1000 with edge 800 must cap to 1333x333, got " +
              std::to_string(capped.image.width) + "x" +
              std::to_string(capped.image.height));
}

struct Criterion {
  int id;
  const char* summary;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "RLE codec round trip (exhaustive <=3x3 + 10k random <=64x64, <5s)", criterion_rle},
      {2, "Li threshold vs brute-force cross-entropy minimizer; 50/200 -> 108.2+-0.5",
       criterion_li},
      {3, "erode/dilate/largest-component match the naive oracle (1000 masks)",
       criterion_morphology},
      {4, "refine_segment: mean IoU >= 0.95 on 200 noisy disks, one component",
       criterion_refine},
      {5, "iou/iob/iom exact vs brute force; score = (iob+iom)/2; wine-glass fixture",
       criterion_metrics},
      {6, "ranking fixture keeps exactly 1 at 0.5/0.5; 20x20 threshold monotonicity",
       criterion_ranking},
      {7, "synthesis: 1000 scenes, mean pastes in [3.4,3.6], invariants, worker-"
          "invariant reruns, <2min",
       criterion_synthesis},
      {8, "cmd_synth COCO output parses, round-trips, RLE sums consistent",
       criterion_coco_output},
      {9, "background resize fixtures 853x640 (uncapped) and 1333x333 (capped)",
       criterion_background_arithmetic},
  };

  const int requested = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (requested != 0 && c.id != requested) continue;
    ++ran;
    try {
      c.run();
      std::printf("[PASS] criterion %d: %s\n", c.id, c.summary);
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %d: %s -- %s\n", c.id, c.summary, e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion: %d\n", requested);
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
