#include "freeseg/refine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "freeseg/error.hpp"

namespace freeseg {

namespace {
constexpr double kLogGuard = 1e-6;  // stands in for a zero class mean under ln
}

void RefineConfig::validate() const {
  if (!(gaussian_sigma > 0)) throw Error("gaussian_sigma must be > 0");
  if (gaussian_radius < 1) throw Error("gaussian_radius must be >= 1");
  if (morph_kernel < 0) throw Error("morph_kernel must be >= 0");
  if (!(li_tolerance > 0)) throw Error("li_tolerance must be > 0");
  if (li_max_iters < 1) throw Error("li_max_iters must be >= 1");
}

GrayMap gaussian_filter(const GrayMap& map, double sigma, int radius) {
  validate(map);
  if (!(sigma > 0)) throw Error("gaussian_sigma must be > 0");
  if (radius < 1) throw Error("gaussian_radius must be >= 1");
  if (map.width == 0 || map.height == 0) return map;

  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  const int w = map.width, h = map.height;
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xi = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * map.at(xi, y);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayMap out;
  out.width = w;
  out.height = h;
  out.data.resize(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yi = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yi) * w + x];
      }
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(acc), 0, 255));
    }
  }
  return out;
}

double li_threshold(const GrayMap& map, double tolerance, int max_iters) {
  validate(map);
  if (!(tolerance > 0)) throw Error("li_tolerance must be > 0");
  if (max_iters < 1) throw Error("li_max_iters must be >= 1");

  std::array<std::int64_t, 256> hist{};
  for (std::uint8_t v : map.data) ++hist[v];
  int distinct = 0;
  for (std::int64_t c : hist) distinct += (c > 0);
  if (distinct < 2) throw Error("constant map: no threshold separates it");

  std::array<std::int64_t, 256> pref_n{}, pref_s{};
  std::int64_t n = 0, s = 0;
  for (int g = 0; g < 256; ++g) {
    n += hist[g];
    s += hist[g] * g;
    pref_n[g] = n;
    pref_s[g] = s;
  }

  double t = static_cast<double>(s) / static_cast<double>(n);
  for (int iter = 0; iter < max_iters; ++iter) {
    const int cut = std::clamp(static_cast<int>(std::floor(t)), 0, 255);
    const std::int64_t nb = pref_n[cut], sb = pref_s[cut];
    const std::int64_t nf = n - nb, sf = s - sb;
    double mb = nb > 0 ? static_cast<double>(sb) / nb : 0.0;
    double mf = nf > 0 ? static_cast<double>(sf) / nf : 0.0;
    mb = std::max(mb, kLogGuard);
    mf = std::max(mf, kLogGuard);
    const double denom = std::log(mb) - std::log(mf);
    if (denom == 0.0) return t;
    const double next = (mb - mf) / denom;
    if (std::abs(next - t) < tolerance) return next;
    t = next;
  }
  return t;
}

BinaryMask binarize(const GrayMap& map, double threshold) {
  validate(map);
  BinaryMask out = BinaryMask::zeros(map.width, map.height);
  for (std::size_t i = 0; i < map.data.size(); ++i)
    out.bits[i] = map.data[i] > threshold ? 1 : 0;
  return out;
}

namespace {

enum class MorphKind { erode, dilate };

// Separable pass along one axis; out-of-bounds neighbors are false.
BinaryMask morph_pass(const BinaryMask& in, int halfwidth, MorphKind kind, bool horizontal) {
  BinaryMask out = BinaryMask::zeros(in.width, in.height);
  const int limit = horizontal ? in.width : in.height;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const int pos = horizontal ? x : y;
      bool value = kind == MorphKind::erode;
      for (int d = -halfwidth; d <= halfwidth; ++d) {
        const int q = pos + d;
        const bool neighbor =
            (q >= 0 && q < limit) && (horizontal ? in.at(q, y) : in.at(x, q));
        if (kind == MorphKind::erode) {
          if (!neighbor) {
            value = false;
            break;
          }
        } else {
          if (neighbor) {
            value = true;
            break;
          }
        }
      }
      out.set(x, y, value);
    }
  }
  return out;
}

BinaryMask morph(const BinaryMask& mask, int halfwidth, MorphKind kind) {
  validate(mask);
  if (halfwidth < 0) throw Error("morph kernel half-width must be >= 0");
  if (halfwidth == 0 || mask.width == 0 || mask.height == 0) return mask;
  return morph_pass(morph_pass(mask, halfwidth, kind, true), halfwidth, kind, false);
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int halfwidth) {
  return morph(mask, halfwidth, MorphKind::erode);
}

BinaryMask dilate(const BinaryMask& mask, int halfwidth) {
  return morph(mask, halfwidth, MorphKind::dilate);
}

BinaryMask largest_connected_component(const BinaryMask& mask, Connectivity connectivity) {
  validate(mask);
  const int w = mask.width, h = mask.height;
  BinaryMask out = BinaryMask::zeros(w, h);
  if (area(mask) == 0) return out;

  static constexpr int dx8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int dy8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int dx4[] = {0, -1, 1, 0};
  static constexpr int dy4[] = {-1, 0, 0, 1};
  const int* dx = connectivity == Connectivity::eight ? dx8 : dx4;
  const int* dy = connectivity == Connectivity::eight ? dy8 : dy4;
  const int ndirs = connectivity == Connectivity::eight ? 8 : 4;

  std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::int64_t> sizes;
  std::int32_t best = -1;
  std::int64_t best_size = 0;
  std::vector<std::int64_t> stack;

  for (std::int64_t start = 0; start < static_cast<std::int64_t>(label.size()); ++start) {
    if (!mask.bits[start] || label[start] != -1) continue;
    const std::int32_t id = static_cast<std::int32_t>(sizes.size());
    std::int64_t size = 0;
    label[start] = id;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::int64_t p = stack.back();
      stack.pop_back();
      ++size;
      const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
      for (int k = 0; k < ndirs; ++k) {
        const int qx = px + dx[k], qy = py + dy[k];
        if (qx < 0 || qx >= w || qy < 0 || qy >= h) continue;
        const std::int64_t q = static_cast<std::int64_t>(qy) * w + qx;
        if (mask.bits[q] && label[q] == -1) {
          label[q] = id;
          stack.push_back(q);
        }
      }
    }
    sizes.push_back(size);
    // strictly-greater keeps the earliest component on ties, which is the
    // one whose first pixel has the smallest row-major index
    if (size > best_size) {
      best_size = size;
      best = id;
    }
  }

  for (std::size_t i = 0; i < label.size(); ++i) out.bits[i] = (label[i] == best) ? 1 : 0;
  return out;
}

BinaryMask refine_segment(const GrayMap& map, const RefineConfig& cfg) {
  cfg.validate();
  const GrayMap blurred = gaussian_filter(map, cfg.gaussian_sigma, cfg.gaussian_radius);
  const double t = li_threshold(blurred, cfg.li_tolerance, cfg.li_max_iters);
  BinaryMask m = binarize(blurred, t);
  const int k = cfg.morph_kernel;
  if (cfg.morph_order == MorphOrder::open_then_close) {
    m = erode(m, k);
    m = dilate(m, k);
    m = dilate(m, k);
    m = erode(m, k);
  } else {
    m = dilate(m, k);
    m = erode(m, k);
    m = erode(m, k);
    m = dilate(m, k);
  }
  return largest_connected_component(m, cfg.connectivity);
}

}  // namespace freeseg
