#pragma once

#include <string>
#include <vector>

#include "freeseg/mask.hpp"

namespace freeseg {

/// Classifier probability for the target class before and after the
/// localized box region is removed from the image.
struct ConfidencePair {
  double before = 0.0;
  double after = 0.0;
};

struct RankInput {
  std::string record_id;
  int class_id = 0;
  BinaryMask mask;
  BoundingBox box;
  ConfidencePair conf;
};

/// One segment with its agreement metrics and verdict. For structurally
/// unusable records (empty mask, zero prior confidence) the affected metrics
/// stay 0, kept is false, and reject_reason names the cause.
struct ScoredSegment {
  std::string record_id;
  int class_id = 0;
  BinaryMask mask;
  BoundingBox box;
  double iob = 0.0;
  double iom = 0.0;
  double freeseg_score = 0.0;
  double drop_rate = 0.0;
  bool kept = false;
  std::string reject_reason;  // empty when kept
};

/// Overlap metrics between a mask and a box treated as a filled rectangle.
/// Shared numerator I = intersection_area; denominators differ:
///   iou = I / (A_mask + A_box - I), iob = I / A_box, iom = I / A_mask.
/// Zero-area operands yield 0 instead of erroring so one degenerate record
/// cannot abort a batch.
double iou(const BinaryMask& mask, const BoundingBox& box);
double iob(const BinaryMask& mask, const BoundingBox& box);
double iom(const BinaryMask& mask, const BoundingBox& box);

/// Mean of iob and iom.
double freeseg_score(const BinaryMask& mask, const BoundingBox& box);

/// Relative confidence drop (before - after) / before. Throws Error when
/// before is not positive.
double drop_rate(const ConfidencePair& conf);

/// Scores every record and applies the dual strict-threshold filter:
/// kept iff freeseg_score > score_threshold AND drop_rate > drop_threshold.
/// Input order is preserved; per-record problems reject the record with a
/// reason instead of throwing.
std::vector<ScoredSegment> rank_segments(const std::vector<RankInput>& records,
                                         double score_threshold,
                                         double drop_threshold);

}  // namespace freeseg
