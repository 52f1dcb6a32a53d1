#include "freeseg/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "freeseg/error.hpp"

namespace freeseg {

GrayMap GrayMap::filled(int w, int h, std::uint8_t value) {
  GrayMap m;
  m.width = w;
  m.height = h;
  m.data.assign(static_cast<std::size_t>(w) * h, value);
  return m;
}

BinaryMask BinaryMask::zeros(int w, int h) {
  BinaryMask m;
  m.width = w;
  m.height = h;
  m.bits.assign(static_cast<std::size_t>(w) * h, 0);
  return m;
}

void validate(const GrayMap& map) {
  if (map.width < 0 || map.height < 0)
    throw Error("gray map has negative dimensions");
  if (map.data.size() != static_cast<std::size_t>(map.width) * map.height)
    throw Error("gray map data size does not match width*height");
}

void validate(const BinaryMask& mask) {
  if (mask.width < 0 || mask.height < 0)
    throw Error("mask has negative dimensions");
  if (mask.bits.size() != static_cast<std::size_t>(mask.width) * mask.height)
    throw Error("mask bit count does not match width*height");
}

BoundingBox clamp_to(const BoundingBox& box, int img_w, int img_h) {
  const int x0 = std::clamp(box.x, 0, img_w);
  const int y0 = std::clamp(box.y, 0, img_h);
  const int x1 = std::clamp(box.x + box.w, x0, img_w);
  const int y1 = std::clamp(box.y + box.h, y0, img_h);
  return {x0, y0, x1 - x0, y1 - y0};
}

BinaryMask box_to_mask(const BoundingBox& box, int img_w, int img_h) {
  BinaryMask m = BinaryMask::zeros(img_w, img_h);
  const BoundingBox b = clamp_to(box, img_w, img_h);
  for (int y = b.y; y < b.y + b.h; ++y)
    std::fill_n(m.bits.begin() + static_cast<std::size_t>(y) * img_w + b.x, b.w,
                static_cast<std::uint8_t>(1));
  return m;
}

std::int64_t area(const BinaryMask& mask) {
  std::int64_t n = 0;
  for (std::uint8_t b : mask.bits) n += (b != 0);
  return n;
}

std::int64_t intersection_area(const BinaryMask& mask, const BoundingBox& box) {
  const BoundingBox b = clamp_to(box, mask.width, mask.height);
  std::int64_t n = 0;
  for (int y = b.y; y < b.y + b.h; ++y) {
    const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
    for (int x = b.x; x < b.x + b.w; ++x) n += (row[x] != 0);
  }
  return n;
}

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height)
    throw Error("mask dimension mismatch: " + std::to_string(a.width) + "x" +
                std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                std::to_string(b.height));
  std::int64_t n = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) n += (a.bits[i] != 0 && b.bits[i] != 0);
  return n;
}

RleMask rle_encode(const BinaryMask& mask) {
  validate(mask);
  RleMask rle{mask.width, mask.height, {}};
  std::uint32_t run = 0;
  bool current = false;  // first run always counts zeros
  for (int x = 0; x < mask.width; ++x) {
    const std::uint8_t* col = mask.bits.data() + x;
    for (int y = 0; y < mask.height; ++y) {
      const bool v = col[static_cast<std::size_t>(y) * mask.width] != 0;
      if (v == current) {
        ++run;
      } else {
        rle.counts.push_back(run);
        run = 1;
        current = v;
      }
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask rle_decode(const RleMask& rle) {
  if (rle.width < 0 || rle.height < 0) throw Error("RLE has negative dimensions");
  const std::int64_t total = static_cast<std::int64_t>(rle.width) * rle.height;
  const std::int64_t sum =
      std::accumulate(rle.counts.begin(), rle.counts.end(), std::int64_t{0});
  if (sum != total)
    throw Error("RLE counts sum to " + std::to_string(sum) + ", expected " +
                std::to_string(total));
  BinaryMask mask = BinaryMask::zeros(rle.width, rle.height);
  int x = 0, y = 0;
  bool v = false;
  for (std::uint32_t c : rle.counts) {
    for (std::uint32_t i = 0; i < c; ++i) {
      mask.bits[static_cast<std::size_t>(y) * rle.width + x] = v ? 1 : 0;
      if (++y == rle.height) {
        y = 0;
        ++x;
      }
    }
    v = !v;
  }
  return mask;
}

BoundingBox bbox_of(const BinaryMask& mask) {
  int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
    for (int x = 0; x < mask.width; ++x) {
      if (!row[x]) continue;
      min_x = std::min(min_x, x);
      min_y = std::min(min_y, y);
      max_x = std::max(max_x, x);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) throw Error("empty mask has no bounding box");
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace freeseg
