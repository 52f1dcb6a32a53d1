#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "freeseg/mask.hpp"

namespace freeseg {

/// 8-bit RGB raster, row-major, channels interleaved.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 * width * height

  static Image filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  std::array<std::uint8_t, 3> at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }

  bool operator==(const Image&) const = default;
};

void validate(const Image& image);

/// Bilinear resample with pixel-center alignment.
Image resize_bilinear(const Image& src, int new_w, int new_h);

/// Nearest-neighbor resample. Pixel centers are mapped with exact integer
/// arithmetic, so results are reproducible across platforms.
BinaryMask resize_nearest(const BinaryMask& src, int new_w, int new_h);

Image flip_horizontal(const Image& src);
BinaryMask flip_horizontal(const BinaryMask& src);

}  // namespace freeseg
