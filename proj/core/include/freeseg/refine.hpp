#pragma once

#include "freeseg/mask.hpp"

namespace freeseg {

enum class MorphOrder { open_then_close, close_then_open };
enum class Connectivity { four, eight };

/// Knobs for turning a raw grayscale co-segmentation map into one clean
/// binary instance mask. Defaults target 224-512 px object-centric inputs.
struct RefineConfig {
  double gaussian_sigma = 2.0;
  int gaussian_radius = 4;  // kernel half-width; 2*ceil(sigma)
  int morph_kernel = 1;     // structuring-element half-width (side 2k+1)
  MorphOrder morph_order = MorphOrder::open_then_close;
  double li_tolerance = 0.5;  // intensity levels
  int li_max_iters = 100;
  Connectivity connectivity = Connectivity::eight;

  void validate() const;  // throws Error on out-of-range fields
};

/// Separable Gaussian blur. The 1-D kernel is normalized to sum 1, borders
/// replicate the edge pixel, and the result is quantized once at the end.
GrayMap gaussian_filter(const GrayMap& map, double sigma, int radius);

/// Minimum cross-entropy threshold between foreground and background.
///
/// Iterates t_{k+1} = (m_b - m_f) / (ln m_b - ln m_f) from t_0 = mean
/// intensity, where m_b / m_f are the mean intensities of pixels <= t / > t.
/// A class mean of 0 is replaced by 1e-6 before the logarithm. Stops when
/// |t_{k+1} - t_k| < tolerance or after max_iters steps.
///
/// Throws Error when the map holds fewer than two distinct values.
double li_threshold(const GrayMap& map, double tolerance, int max_iters);

/// Pixel true iff intensity > threshold (strict).
BinaryMask binarize(const GrayMap& map, double threshold);

/// Square-element morphology, element side 2*halfwidth+1. Out-of-bounds
/// neighbors count as false, so erosion eats the border and dilation never
/// wraps.
BinaryMask erode(const BinaryMask& mask, int halfwidth);
BinaryMask dilate(const BinaryMask& mask, int halfwidth);

/// Mask restricted to its largest connected component. Ties go to the
/// component containing the smallest row-major pixel index. Empty in, empty
/// out.
BinaryMask largest_connected_component(const BinaryMask& mask, Connectivity connectivity);

/// Full post-processing chain: blur, Li threshold, binarize, morphology in
/// cfg order, keep the largest component. A constant map throws (no
/// threshold exists); a mask that vanishes during morphology comes back
/// empty rather than erroring so batch callers can tag and move on.
BinaryMask refine_segment(const GrayMap& map, const RefineConfig& cfg);

}  // namespace freeseg
