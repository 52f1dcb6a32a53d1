#include "freeseg/image.hpp"

#include <algorithm>
#include <cmath>

#include "freeseg/error.hpp"

namespace freeseg {

Image Image::filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img;
  img.width = w;
  img.height = h;
  img.rgb.resize(3 * static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
    img.rgb[i] = r;
    img.rgb[i + 1] = g;
    img.rgb[i + 2] = b;
  }
  return img;
}

void validate(const Image& image) {
  if (image.width < 0 || image.height < 0) throw Error("image has negative dimensions");
  if (image.rgb.size() != 3 * static_cast<std::size_t>(image.width) * image.height)
    throw Error("image buffer size does not match 3*width*height");
}

Image resize_bilinear(const Image& src, int new_w, int new_h) {
  validate(src);
  if (new_w <= 0 || new_h <= 0) throw Error("resize target must be positive");
  Image dst;
  dst.width = new_w;
  dst.height = new_h;
  dst.rgb.resize(3 * static_cast<std::size_t>(new_w) * new_h);
  if (src.width == 0 || src.height == 0) throw Error("cannot resize an empty image");

  const double sx = static_cast<double>(src.width) / new_w;
  const double sy = static_cast<double>(src.height) / new_h;
  // per-axis sample positions hoisted out of the pixel loop
  std::vector<int> x0s(new_w), x1s(new_w);
  std::vector<double> wxs(new_w);
  for (int x = 0; x < new_w; ++x) {
    double fx = (x + 0.5) * sx - 0.5;
    fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
    x0s[x] = static_cast<int>(fx);
    x1s[x] = std::min(x0s[x] + 1, src.width - 1);
    wxs[x] = fx - x0s[x];
  }
  for (int y = 0; y < new_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = fy - y0;
    const std::uint8_t* row0 = src.rgb.data() + 3 * static_cast<std::size_t>(y0) * src.width;
    const std::uint8_t* row1 = src.rgb.data() + 3 * static_cast<std::size_t>(y1) * src.width;
    std::uint8_t* out = dst.rgb.data() + 3 * static_cast<std::size_t>(y) * new_w;
    for (int x = 0; x < new_w; ++x) {
      const int a = 3 * x0s[x], b = 3 * x1s[x];
      const double wx = wxs[x];
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - wx) * row0[a + c] + wx * row0[b + c];
        const double bot = (1.0 - wx) * row1[a + c] + wx * row1[b + c];
        const double v = (1.0 - wy) * top + wy * bot;
        out[3 * x + c] =
            static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
      }
    }
  }
  return dst;
}

BinaryMask resize_nearest(const BinaryMask& src, int new_w, int new_h) {
  validate(src);
  if (new_w <= 0 || new_h <= 0) throw Error("resize target must be positive");
  if (src.width == 0 || src.height == 0) throw Error("cannot resize an empty mask");
  BinaryMask dst = BinaryMask::zeros(new_w, new_h);
  // floor((i+0.5)*src/dst) per axis, computed exactly in integers
  std::vector<int> sxs(new_w);
  for (int x = 0; x < new_w; ++x)
    sxs[x] = static_cast<int>(
        std::min<std::int64_t>((2LL * x + 1) * src.width / (2LL * new_w), src.width - 1));
  for (int y = 0; y < new_h; ++y) {
    const int sy = static_cast<int>(std::min<std::int64_t>(
        (2LL * y + 1) * src.height / (2LL * new_h), src.height - 1));
    const std::uint8_t* src_row = src.bits.data() + static_cast<std::size_t>(sy) * src.width;
    std::uint8_t* dst_row = dst.bits.data() + static_cast<std::size_t>(y) * new_w;
    for (int x = 0; x < new_w; ++x) dst_row[x] = src_row[sxs[x]];
  }
  return dst;
}

Image flip_horizontal(const Image& src) {
  validate(src);
  Image dst = src;
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const auto p = src.at(src.width - 1 - x, y);
      dst.set(x, y, p[0], p[1], p[2]);
    }
  return dst;
}

BinaryMask flip_horizontal(const BinaryMask& src) {
  validate(src);
  BinaryMask dst = src;
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) dst.set(x, y, src.at(src.width - 1 - x, y));
  return dst;
}

}  // namespace freeseg
