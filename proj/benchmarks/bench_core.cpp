#include <benchmark/benchmark.h>

#include "freeseg/mask.hpp"
#include "freeseg/rank.hpp"
#include "freeseg/refine.hpp"
#include "freeseg/rng.hpp"
#include "freeseg/synth.hpp"

using namespace freeseg;

namespace {

BinaryMask random_mask(int w, int h, double density, std::uint64_t seed) {
  Rng rng(seed);
  BinaryMask m = BinaryMask::zeros(w, h);
  for (auto& b : m.bits) b = rng.bernoulli(density) ? 1 : 0;
  return m;
}

BinaryMask disk(int w, int h, double r) {
  BinaryMask m = BinaryMask::zeros(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x - w / 2.0, dy = y - h / 2.0;
      m.set(x, y, dx * dx + dy * dy <= r * r);
    }
  return m;
}

Image random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Image img = Image::filled(w, h, 0, 0, 0);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.uniform_index(256));
  return img;
}

void BM_RleEncode(benchmark::State& state) {
  const BinaryMask m = random_mask(512, 512, 0.4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rle_encode(m));
  state.SetItemsProcessed(state.iterations() * 512 * 512);
}
BENCHMARK(BM_RleEncode);

void BM_RleDecode(benchmark::State& state) {
  const RleMask rle = rle_encode(random_mask(512, 512, 0.4, 1));
  for (auto _ : state) benchmark::DoNotOptimize(rle_decode(rle));
  state.SetItemsProcessed(state.iterations() * 512 * 512);
}
BENCHMARK(BM_RleDecode);

void BM_GaussianFilter(benchmark::State& state) {
  Rng rng(2);
  GrayMap map = GrayMap::filled(256, 256, 0);
  for (auto& v : map.data) v = static_cast<std::uint8_t>(rng.uniform_index(256));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_filter(map, 2.0, 4));
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_GaussianFilter);

void BM_RefineSegment(benchmark::State& state) {
  Rng rng(3);
  const BinaryMask truth = disk(256, 256, 80.0);
  GrayMap map = GrayMap::filled(256, 256, 0);
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    const int base = truth.bits[i] ? 220 : 30;
    map.data[i] = static_cast<std::uint8_t>(base + rng.uniform_int(-10, 10));
  }
  const RefineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(refine_segment(map, cfg));
}
BENCHMARK(BM_RefineSegment);

void BM_FreesegScore(benchmark::State& state) {
  const BinaryMask m = random_mask(512, 512, 0.35, 4);
  const BoundingBox box{64, 64, 384, 384};
  for (auto _ : state) benchmark::DoNotOptimize(freeseg_score(m, box));
}
BENCHMARK(BM_FreesegScore);

void BM_SynthesizeScene(benchmark::State& state) {
  std::vector<BackgroundSample> bgs(1);
  bgs[0].id = 1;
  bgs[0].image = random_image(512, 512, 5);
  SceneAnnotation native;
  native.class_id = 1;
  native.mask = disk(512, 512, 90.0);
  native.box = bbox_of(native.mask);
  native.visible_area = native.original_area = area(native.mask);
  bgs[0].annotations.push_back(std::move(native));
  SegmentCatalog segs;
  SegmentSample seg;
  seg.record_id = "s";
  seg.class_id = 2;
  seg.image = random_image(256, 256, 6);
  seg.mask = disk(256, 256, 80.0);
  segs.samples.push_back(std::move(seg));
  segs.build_index();
  PastePolicy policy;
  policy.seed = 7;
  std::uint64_t index = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(synthesize_scene(bgs, segs, policy, index++));
}
BENCHMARK(BM_SynthesizeScene);

}  // namespace

BENCHMARK_MAIN();
