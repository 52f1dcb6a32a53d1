#pragma once

#include <cstdint>
#include <vector>

namespace freeseg {

/// Single-channel 8-bit intensity raster, row-major.
struct GrayMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // width * height values

  static GrayMap filled(int w, int h, std::uint8_t value);

  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const GrayMap&) const = default;
};

/// Boolean raster, row-major. Entries are normalized to 0/1 so masks compare
/// with operator==.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // width * height entries, each 0 or 1

  static BinaryMask zeros(int w, int h);

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

  bool operator==(const BinaryMask&) const = default;
};

/// Axis-aligned pixel box: origin inclusive, extent exclusive (x .. x+w).
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  std::int64_t rect_area() const { return static_cast<std::int64_t>(w) * h; }

  bool operator==(const BoundingBox&) const = default;
};

/// COCO uncompressed RLE: column-major scan, first run counts zeros.
struct RleMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> counts;

  bool operator==(const RleMask&) const = default;
};

/// Throws Error when the raster's declared size and storage disagree.
void validate(const GrayMap& map);
void validate(const BinaryMask& mask);

/// Box clipped to an image of the given dimensions. Extents never go negative.
BoundingBox clamp_to(const BoundingBox& box, int img_w, int img_h);

/// Box rasterized as a filled rectangle on an img_w x img_h grid.
BinaryMask box_to_mask(const BoundingBox& box, int img_w, int img_h);

/// Number of true pixels.
std::int64_t area(const BinaryMask& mask);

/// True pixels inside the box (clamped to the mask's bounds).
std::int64_t intersection_area(const BinaryMask& mask, const BoundingBox& box);

/// True pixels shared by two masks of identical dimensions; mismatch throws.
std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b);

RleMask rle_encode(const BinaryMask& mask);

/// Inverse of rle_encode. Throws Error when counts do not sum to width*height.
BinaryMask rle_decode(const RleMask& rle);

/// Tightest box containing every true pixel. Throws Error on an empty mask.
BoundingBox bbox_of(const BinaryMask& mask);

}  // namespace freeseg
