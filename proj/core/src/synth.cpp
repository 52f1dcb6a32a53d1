#include "freeseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "freeseg/error.hpp"
#include "parallel.hpp"

namespace freeseg {

void PastePolicy::validate() const {
  if (n_min < 1 || n_max < n_min) throw Error("paste count range must satisfy 1 <= n_min <= n_max");
  if (!(paste_scale_min > 0) || paste_scale_max < paste_scale_min)
    throw Error("paste scale range must be positive and ordered");
  if (paste_flip_prob < 0 || paste_flip_prob > 1 || bg_flip_prob < 0 || bg_flip_prob > 1)
    throw Error("flip probabilities must lie in [0,1]");
  if (bg_shortest_edges.empty()) throw Error("bg_shortest_edges must not be empty");
  for (int e : bg_shortest_edges)
    if (e < 1) throw Error("bg_shortest_edges entries must be >= 1");
  if (bg_max_size < 1) throw Error("bg_max_size must be >= 1");
  if (min_visible_fraction < 0 || min_visible_fraction > 1)
    throw Error("min_visible_fraction must lie in [0,1]");
  if (min_visible_pixels < 0) throw Error("min_visible_pixels must be >= 0");
  if (paste_max_attempts < 1) throw Error("paste_max_attempts must be >= 1");
}

void SegmentCatalog::build_index() {
  by_class.clear();
  class_ids.clear();
  for (std::size_t i = 0; i < samples.size(); ++i)
    by_class[samples[i].class_id].push_back(i);
  std::set<int> ids;
  for (const auto& [cid, _] : by_class) ids.insert(cid);
  class_ids.assign(ids.begin(), ids.end());
}

BackgroundTransform transform_background(const Image& image,
                                         const std::vector<SceneAnnotation>& annotations,
                                         const PastePolicy& policy, Rng& rng) {
  validate(image);
  if (image.width == 0 || image.height == 0) throw Error("background image is empty");

  const int edge =
      policy.bg_shortest_edges[rng.uniform_index(policy.bg_shortest_edges.size())];
  const double s1 = static_cast<double>(edge) / std::min(image.width, image.height);
  double w1 = image.width * s1;
  double h1 = image.height * s1;
  const double longest = std::max(w1, h1);
  if (longest > policy.bg_max_size) {
    const double s2 = policy.bg_max_size / longest;
    w1 *= s2;
    h1 *= s2;
  }
  const int nw = std::max(1, static_cast<int>(std::lround(w1)));
  const int nh = std::max(1, static_cast<int>(std::lround(h1)));
  const bool flip = rng.bernoulli(policy.bg_flip_prob);

  BackgroundTransform out;
  out.image = resize_bilinear(image, nw, nh);
  if (flip) out.image = flip_horizontal(out.image);

  for (const SceneAnnotation& a : annotations) {
    BinaryMask m = resize_nearest(a.mask, nw, nh);
    if (flip) m = flip_horizontal(m);
    const std::int64_t visible = area(m);
    if (visible == 0 || visible < policy.min_visible_pixels) {
      ++out.annotations_dropped;
      continue;
    }
    SceneAnnotation na;
    na.class_id = a.class_id;
    na.box = bbox_of(m);
    na.mask = std::move(m);
    na.source = AnnotationSource::native;
    na.visible_area = visible;
    na.original_area = visible;
    out.annotations.push_back(std::move(na));
  }
  return out;
}

std::optional<PastePatch> transform_paste(const Image& segment_image,
                                          const BinaryMask& segment_mask, int target_w,
                                          int target_h, const PastePolicy& policy, Rng& rng) {
  validate(segment_image);
  validate(segment_mask);
  if (segment_image.width != segment_mask.width || segment_image.height != segment_mask.height)
    throw Error("segment image and mask dimensions differ");
  if (area(segment_mask) == 0) throw Error("segment mask is empty");
  if (target_w < 1 || target_h < 1) throw Error("paste target must be positive");

  const bool flip = rng.bernoulli(policy.paste_flip_prob);
  const double scale = rng.uniform_real(policy.paste_scale_min, policy.paste_scale_max);
  const int sw = std::max(1, static_cast<int>(std::lround(segment_image.width * scale)));
  const int sh = std::max(1, static_cast<int>(std::lround(segment_image.height * scale)));
  const std::uint64_t dx = rng.uniform_index(static_cast<std::uint64_t>(std::abs(sw - target_w)) + 1);
  const std::uint64_t dy = rng.uniform_index(static_cast<std::uint64_t>(std::abs(sh - target_h)) + 1);

  Image img = flip ? flip_horizontal(segment_image) : segment_image;
  BinaryMask msk = flip ? flip_horizontal(segment_mask) : segment_mask;
  img = resize_bilinear(img, sw, sh);
  msk = resize_nearest(msk, sw, sh);

  // per axis: crop window into the content when it is larger than the
  // target, pad offset onto the canvas when smaller
  const int src_x0 = sw > target_w ? static_cast<int>(dx) : 0;
  const int dst_x0 = sw > target_w ? 0 : static_cast<int>(dx);
  const int copy_w = std::min(sw, target_w);
  const int src_y0 = sh > target_h ? static_cast<int>(dy) : 0;
  const int dst_y0 = sh > target_h ? 0 : static_cast<int>(dy);
  const int copy_h = std::min(sh, target_h);

  PastePatch out;
  out.patch = Image::filled(target_w, target_h, 0, 0, 0);
  out.mask = BinaryMask::zeros(target_w, target_h);
  for (int y = 0; y < copy_h; ++y) {
    const std::size_t src_row = static_cast<std::size_t>(src_y0 + y) * sw + src_x0;
    const std::size_t dst_row = static_cast<std::size_t>(dst_y0 + y) * target_w + dst_x0;
    std::memcpy(&out.patch.rgb[3 * dst_row], &img.rgb[3 * src_row],
                3 * static_cast<std::size_t>(copy_w));
    std::memcpy(&out.mask.bits[dst_row], &msk.bits[src_row],
                static_cast<std::size_t>(copy_w));
  }
  if (area(out.mask) == 0) return std::nullopt;
  return out;
}

namespace {

BoundingBox intersect_boxes(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w), y1 = std::min(a.y + a.h, b.y + b.h);
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

// bbox_of restricted to a region already known to contain every true pixel
BoundingBox bbox_within(const BinaryMask& mask, const BoundingBox& hint) {
  int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
  for (int y = hint.y; y < hint.y + hint.h; ++y)
    for (int x = hint.x; x < hint.x + hint.w; ++x)
      if (mask.at(x, y)) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
  if (max_x < 0) throw Error("empty mask has no bounding box");
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace

void paste(SynthScene& scene, const Image& patch, const BinaryMask& mask, int class_id,
           const PastePolicy& policy) {
  if (patch.width != scene.image.width || patch.height != scene.image.height ||
      mask.width != scene.image.width || mask.height != scene.image.height)
    throw Error("paste patch does not match scene dimensions");
  if (area(mask) == 0) throw Error("paste mask is empty");

  const BoundingBox paste_box = bbox_of(mask);
  for (int y = paste_box.y; y < paste_box.y + paste_box.h; ++y)
    for (int x = paste_box.x; x < paste_box.x + paste_box.w; ++x)
      if (mask.at(x, y)) {
        const auto p = patch.at(x, y);
        scene.image.set(x, y, p[0], p[1], p[2]);
      }

  std::vector<SceneAnnotation> survivors;
  survivors.reserve(scene.annotations.size() + 1);
  for (SceneAnnotation& a : scene.annotations) {
    const BoundingBox overlap = intersect_boxes(a.box, paste_box);
    bool changed = false;
    for (int y = overlap.y; y < overlap.y + overlap.h; ++y)
      for (int x = overlap.x; x < overlap.x + overlap.w; ++x)
        if (a.mask.at(x, y) && mask.at(x, y)) {
          a.mask.set(x, y, false);
          --a.visible_area;
          changed = true;
        }
    if (changed) {
      const bool too_small =
          a.visible_area < policy.min_visible_pixels ||
          static_cast<double>(a.visible_area) <
              policy.min_visible_fraction * static_cast<double>(a.original_area);
      if (too_small) {
        ++scene.annotations_dropped;
        continue;
      }
      a.box = bbox_within(a.mask, a.box);
    }
    survivors.push_back(std::move(a));
  }
  scene.annotations = std::move(survivors);

  SceneAnnotation na;
  na.class_id = class_id;
  na.mask = mask;
  na.box = bbox_of(mask);
  na.source = AnnotationSource::pasted;
  na.visible_area = area(mask);
  na.original_area = na.visible_area;
  na.paste_index = static_cast<int>(scene.paste_masks.size());
  scene.annotations.push_back(std::move(na));
  scene.paste_masks.push_back(mask);
}

SynthScene synthesize_scene(const std::vector<BackgroundSample>& backgrounds,
                            const SegmentCatalog& segments, const PastePolicy& policy,
                            std::uint64_t index) {
  policy.validate();
  if (backgrounds.empty()) throw Error("background catalog is empty");
  if (segments.samples.empty()) throw Error("segment catalog is empty");
  if (policy.class_balanced && segments.class_ids.empty())
    throw Error("segment catalog has no class index; call build_index()");

  Rng rng = substream(policy.seed, index);
  const BackgroundSample& bg = backgrounds[rng.uniform_index(backgrounds.size())];
  BackgroundTransform tb = transform_background(bg.image, bg.annotations, policy, rng);

  SynthScene scene;
  scene.background_id = bg.id;
  scene.image = std::move(tb.image);
  scene.annotations = std::move(tb.annotations);
  scene.annotations_dropped = tb.annotations_dropped;

  const int n = static_cast<int>(rng.uniform_int(policy.n_min, policy.n_max));
  scene.pastes_drawn = n;
  for (int slot = 0; slot < n; ++slot) {
    std::size_t seg_idx;
    if (policy.class_balanced) {
      const int cid = segments.class_ids[rng.uniform_index(segments.class_ids.size())];
      const auto& members = segments.by_class.at(cid);
      seg_idx = members[rng.uniform_index(members.size())];
    } else {
      seg_idx = rng.uniform_index(segments.samples.size());
    }
    const SegmentSample& seg = segments.samples[seg_idx];

    bool applied = false;
    for (int attempt = 0; attempt < policy.paste_max_attempts; ++attempt) {
      auto pp = transform_paste(seg.image, seg.mask, scene.image.width, scene.image.height,
                                policy, rng);
      if (pp) {
        paste(scene, pp->patch, pp->mask, seg.class_id, policy);
        applied = true;
        break;
      }
    }
    if (!applied) ++scene.paste_slots_skipped;
  }
  return scene;
}

void synthesize(const std::vector<BackgroundSample>& backgrounds,
                const SegmentCatalog& segments, const PastePolicy& policy,
                std::size_t count, int workers,
                const std::function<void(std::size_t, SynthScene&&)>& sink) {
  policy.validate();
  if (backgrounds.empty()) throw Error("background catalog is empty");
  if (segments.samples.empty()) throw Error("segment catalog is empty");
  parallel_for(count, workers, [&](std::size_t i) {
    sink(i, synthesize_scene(backgrounds, segments, policy, i));
  });
}

}  // namespace freeseg
