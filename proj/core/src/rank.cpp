#include "freeseg/rank.hpp"

#include "freeseg/error.hpp"

namespace freeseg {

namespace {

struct Overlap {
  std::int64_t inter = 0;
  std::int64_t mask_area = 0;
  std::int64_t box_area = 0;
};

Overlap overlap_of(const BinaryMask& mask, const BoundingBox& box) {
  Overlap o;
  o.mask_area = area(mask);
  o.box_area = clamp_to(box, mask.width, mask.height).rect_area();
  o.inter = intersection_area(mask, box);
  return o;
}

double iou_from(const Overlap& o) {
  const std::int64_t uni = o.mask_area + o.box_area - o.inter;
  return uni == 0 ? 0.0 : static_cast<double>(o.inter) / static_cast<double>(uni);
}

double iob_from(const Overlap& o) {
  return o.box_area == 0 ? 0.0 : static_cast<double>(o.inter) / static_cast<double>(o.box_area);
}

double iom_from(const Overlap& o) {
  return o.mask_area == 0 ? 0.0
                          : static_cast<double>(o.inter) / static_cast<double>(o.mask_area);
}

}  // namespace

double iou(const BinaryMask& mask, const BoundingBox& box) {
  return iou_from(overlap_of(mask, box));
}

double iob(const BinaryMask& mask, const BoundingBox& box) {
  return iob_from(overlap_of(mask, box));
}

double iom(const BinaryMask& mask, const BoundingBox& box) {
  return iom_from(overlap_of(mask, box));
}

double freeseg_score(const BinaryMask& mask, const BoundingBox& box) {
  const Overlap o = overlap_of(mask, box);
  return (iob_from(o) + iom_from(o)) / 2.0;
}

double drop_rate(const ConfidencePair& conf) {
  if (!(conf.before > 0.0)) throw Error("confidence before removal must be > 0");
  return (conf.before - conf.after) / conf.before;
}

std::vector<ScoredSegment> rank_segments(const std::vector<RankInput>& records,
                                         double score_threshold,
                                         double drop_threshold) {
  std::vector<ScoredSegment> out;
  out.reserve(records.size());
  for (const RankInput& rec : records) {
    ScoredSegment s;
    s.record_id = rec.record_id;
    s.class_id = rec.class_id;
    s.mask = rec.mask;
    s.box = rec.box;

    std::string reason;
    const bool mask_ok = area(rec.mask) > 0;
    if (mask_ok) {
      const Overlap o = overlap_of(rec.mask, rec.box);
      s.iob = iob_from(o);
      s.iom = iom_from(o);
      s.freeseg_score = (s.iob + s.iom) / 2.0;
    } else {
      reason = "empty_mask";
    }

    const bool conf_ok = rec.conf.before > 0.0;
    if (conf_ok) {
      s.drop_rate = drop_rate(rec.conf);
    } else {
      reason += reason.empty() ? "zero_confidence" : "+zero_confidence";
    }

    if (reason.empty()) {
      if (!(s.freeseg_score > score_threshold)) reason = "low_score";
      if (!(s.drop_rate > drop_threshold))
        reason += reason.empty() ? "low_drop" : "+low_drop";
    }

    s.kept = reason.empty();
    s.reject_reason = reason;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace freeseg
