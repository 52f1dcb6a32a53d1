#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "freeseg/error.hpp"
#include "freeseg/pipeline.hpp"

namespace freeseg {

std::array<std::uint8_t, 3> overlay_color(std::size_t item_index, bool pasted) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 6> warm = {{{230, 57, 70},
                                                                       {255, 130, 40},
                                                                       {240, 200, 50},
                                                                       {200, 60, 140},
                                                                       {255, 96, 96},
                                                                       {170, 40, 40}}};
  static constexpr std::array<std::array<std::uint8_t, 3>, 6> cool = {{{60, 180, 75},
                                                                       {0, 130, 200},
                                                                       {70, 220, 190},
                                                                       {30, 110, 60},
                                                                       {100, 160, 240},
                                                                       {0, 150, 150}}};
  return pasted ? warm[item_index % warm.size()] : cool[item_index % cool.size()];
}

namespace {

void draw_rect(Image& img, const BoundingBox& box, const std::array<std::uint8_t, 3>& c) {
  const BoundingBox b = clamp_to(box, img.width, img.height);
  if (b.w == 0 || b.h == 0) return;
  for (int x = b.x; x < b.x + b.w; ++x) {
    img.set(x, b.y, c[0], c[1], c[2]);
    img.set(x, b.y + b.h - 1, c[0], c[1], c[2]);
  }
  for (int y = b.y; y < b.y + b.h; ++y) {
    img.set(b.x, y, c[0], c[1], c[2]);
    img.set(b.x + b.w - 1, y, c[0], c[1], c[2]);
  }
}

}  // namespace

Image render_overlay(const Image& base, const std::vector<OverlayItem>& items,
                     const OverlayOptions& options) {
  validate(base);
  Image out = base;
  const int a = static_cast<int>(std::lround(options.alpha * 256.0));
  for (std::size_t i = 0; i < items.size(); ++i) {
    const OverlayItem& item = items[i];
    const auto color = overlay_color(i, item.pasted);
    if (item.mask.width == out.width && item.mask.height == out.height) {
      for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
          if (!item.mask.at(x, y)) continue;
          const auto p = out.at(x, y);
          out.set(x, y,
                  static_cast<std::uint8_t>((p[0] * (256 - a) + color[0] * a + 128) >> 8),
                  static_cast<std::uint8_t>((p[1] * (256 - a) + color[1] * a + 128) >> 8),
                  static_cast<std::uint8_t>((p[2] * (256 - a) + color[2] * a + 128) >> 8));
        }
    } else if (item.mask.width != 0 || item.mask.height != 0) {
      throw Error("overlay mask does not match image dimensions");
    }
    if (item.has_box) draw_rect(out, item.box, color);
  }
  // captions last so masks never tint the text
  cv::Mat view(out.height, out.width, CV_8UC3, out.rgb.data());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const OverlayItem& item = items[i];
    if (item.caption.empty()) continue;
    int bl = 0;
    const auto sz = cv::getTextSize(item.caption, cv::FONT_HERSHEY_SIMPLEX, 0.4, 1, &bl);
    int tx = 2, ty = sz.height + 2 + static_cast<int>(i) * (sz.height + 6);
    if (item.has_box) {
      tx = std::max(0, std::min(item.box.x, out.width - sz.width));
      ty = std::max(sz.height, item.box.y - 3);
    }
    ty = std::max(1, std::min(ty, out.height - 1));
    cv::putText(view, item.caption, {tx, ty}, cv::FONT_HERSHEY_SIMPLEX, 0.4,
                cv::Scalar(255, 255, 255), 1, cv::LINE_8);
  }
  return out;
}

std::string viz_caption(const ManifestRecord& record) {
  std::string s = "id=" + record.record_id;
  if (record.freeseg_score) s += " score=" + format_g6(*record.freeseg_score);
  if (record.drop_rate) s += " drop=" + format_g6(*record.drop_rate);
  if (record.kept) {
    s += *record.kept ? " kept" : " rejected";
    if (!*record.kept && record.reject_reason && !record.reject_reason->empty())
      s += ":" + *record.reject_reason;
  }
  return s;
}

}  // namespace freeseg
