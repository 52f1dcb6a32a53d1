#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "freeseg/image.hpp"
#include "freeseg/mask.hpp"
#include "freeseg/rng.hpp"

namespace freeseg::test {

/// Mask from rows of '.'/'#' characters, e.g. {"..#", "###"}.
inline BinaryMask mask_from(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h > 0 ? static_cast<int>(rows[0].size()) : 0;
  BinaryMask m = BinaryMask::zeros(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, rows[y][x] == '#');
  return m;
}

inline BinaryMask random_mask(Rng& rng, int w, int h, double density = 0.5) {
  BinaryMask m = BinaryMask::zeros(w, h);
  for (auto& b : m.bits) b = rng.bernoulli(density) ? 1 : 0;
  return m;
}

inline GrayMap random_graymap(Rng& rng, int w, int h) {
  GrayMap m = GrayMap::filled(w, h, 0);
  for (auto& v : m.data) v = static_cast<std::uint8_t>(rng.uniform_index(256));
  return m;
}

/// Ground-truth disk raster: pixel true iff its center lies within radius.
inline BinaryMask disk_mask(int w, int h, double cx, double cy, double radius) {
  BinaryMask m = BinaryMask::zeros(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      m.set(x, y, dx * dx + dy * dy <= radius * radius);
    }
  return m;
}

/// Noisy co-segmentation-style map: disk at `fg` on `bg` with +-noise.
inline GrayMap noisy_disk_map(const BinaryMask& truth, int fg, int bg, int noise, Rng& rng) {
  GrayMap map = GrayMap::filled(truth.width, truth.height, 0);
  for (int y = 0; y < truth.height; ++y)
    for (int x = 0; x < truth.width; ++x) {
      const int base = truth.at(x, y) ? fg : bg;
      const int n = static_cast<int>(rng.uniform_int(-noise, noise));
      map.at(x, y) = static_cast<std::uint8_t>(std::clamp(base + n, 0, 255));
    }
  return map;
}

inline Image random_image(Rng& rng, int w, int h) {
  Image img = Image::filled(w, h, 0, 0, 0);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.uniform_index(256));
  return img;
}

inline double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t uni = area(a) + area(b) - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("freeseg_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace freeseg::test
