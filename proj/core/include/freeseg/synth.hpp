#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "freeseg/image.hpp"
#include "freeseg/mask.hpp"
#include "freeseg/rng.hpp"

namespace freeseg {

/// Augmentation policy for compositing segments onto backgrounds.
struct PastePolicy {
  int n_min = 1;  // pastes per background, inclusive range
  int n_max = 6;
  double paste_flip_prob = 0.5;
  double paste_scale_min = 0.1;
  double paste_scale_max = 2.0;
  std::vector<int> bg_shortest_edges = {640, 672, 704, 736, 768, 800};
  int bg_max_size = 1333;
  double bg_flip_prob = 0.5;
  double min_visible_fraction = 0.05;
  std::int64_t min_visible_pixels = 1;
  bool class_balanced = false;  // draw a class first, then a member of it
  int paste_max_attempts = 10;  // degenerate-paste redraws before the slot is skipped
  std::uint64_t seed = 0;

  void validate() const;
};

enum class AnnotationSource { native, pasted };

struct SceneAnnotation {
  int class_id = 0;
  BinaryMask mask;
  BoundingBox box;  // always bbox_of(mask)
  AnnotationSource source = AnnotationSource::native;
  std::int64_t visible_area = 0;
  std::int64_t original_area = 0;  // area when the annotation entered the scene
  int paste_index = -1;            // position in SynthScene::paste_masks; -1 for native
};

/// One synthesized scene plus the bookkeeping needed to audit it.
struct SynthScene {
  std::int64_t background_id = 0;
  Image image;
  std::vector<SceneAnnotation> annotations;
  std::vector<BinaryMask> paste_masks;  // applied paste masks, draw order
  int pastes_drawn = 0;                 // N drawn for this scene
  int paste_slots_skipped = 0;          // slots abandoned after repeated degenerate draws
  int annotations_dropped = 0;          // occluded below the policy minima
};

struct BackgroundSample {
  std::int64_t id = 0;
  Image image;
  std::vector<SceneAnnotation> annotations;
};

struct SegmentSample {
  std::string record_id;
  int class_id = 0;
  Image image;
  BinaryMask mask;
};

/// Kept-segment pool with a per-class index for balanced sampling.
struct SegmentCatalog {
  std::vector<SegmentSample> samples;
  std::vector<int> class_ids;  // distinct, sorted
  std::unordered_map<int, std::vector<std::size_t>> by_class;

  void build_index();
};

struct BackgroundTransform {
  Image image;
  std::vector<SceneAnnotation> annotations;
  int annotations_dropped = 0;
};

/// Scene-centric augmentation: shortest edge resized to a uniformly chosen
/// target, rescaled down if the long edge would exceed bg_max_size, then a
/// Bernoulli horizontal flip. Masks are resampled nearest-neighbor and boxes
/// recomputed. Draw order: edge choice, then flip.
BackgroundTransform transform_background(const Image& image,
                                         const std::vector<SceneAnnotation>& annotations,
                                         const PastePolicy& policy, Rng& rng);

struct PastePatch {
  Image patch;      // target-sized canvas
  BinaryMask mask;  // visible segment pixels on that canvas
};

/// Object-centric augmentation: flip, uniform scale, then a random crop (or
/// pad offset) per axis onto a target-sized canvas. Draw order: flip, scale,
/// x offset, y offset — one draw each, even when an axis has no slack.
/// Returns nullopt when no segment pixel survives (degenerate draw).
std::optional<PastePatch> transform_paste(const Image& segment_image,
                                          const BinaryMask& segment_mask, int target_w,
                                          int target_h, const PastePolicy& policy, Rng& rng);

/// Hard-edged composite of a patch onto the scene. Every earlier annotation
/// loses the newly covered pixels; annotations falling below the visibility
/// minima are dropped. The paste itself is appended as a new annotation.
void paste(SynthScene& scene, const Image& patch, const BinaryMask& mask, int class_id,
           const PastePolicy& policy);

/// Generates scene `index` from substream(policy.seed, index). Fully
/// deterministic in (seed, index, catalogs, policy); draw order per scene:
/// background, background transform, N, then per slot the segment index
/// followed by the paste transform draws.
SynthScene synthesize_scene(const std::vector<BackgroundSample>& backgrounds,
                            const SegmentCatalog& segments, const PastePolicy& policy,
                            std::uint64_t index);

/// Streams `count` scenes to `sink(index, scene)`. With workers > 1 the sink
/// is called concurrently (and out of order); results are still the same for
/// any worker count because every scene owns its RNG substream. Throws on
/// empty catalogs before producing anything.
void synthesize(const std::vector<BackgroundSample>& backgrounds,
                const SegmentCatalog& segments, const PastePolicy& policy,
                std::size_t count, int workers,
                const std::function<void(std::size_t, SynthScene&&)>& sink);

}  // namespace freeseg
