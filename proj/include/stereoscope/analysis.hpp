#pragma once

#include <string>

#include "stereoscope/image.hpp"
#include "stereoscope/pipeline.hpp"

namespace stereoscope {

struct BlockMatchParams {
  int max_abs_disp = 24;  // search range [-max_abs_disp, +max_abs_disp]
  int block = 9;          // odd block size
  int vertical_range = 0; // extra row offsets searched per candidate
  double texture_min_variance = 1e-4;  // luma^2 units, in [0,1]
  double ratio_max = 0.9;              // best/second-best SAD acceptance
};

// Integer SAD block matching on 8-bit quantized luma. A pixel is valid when
// its block is textured and the best cost beats the second-best candidate
// (excluding the immediate neighbors of the best) by the ratio test.
DisparityMap block_match_disparity(const Frame& left, const Frame& right,
                                   const BlockMatchParams& params = {}, int workers = 0);

inline DisparityMap block_match_disparity(const Frame& left, const Frame& right,
                                          int max_abs_disp, int block, int workers = 0) {
  BlockMatchParams p;
  p.max_abs_disp = max_abs_disp;
  p.block = block;
  return block_match_disparity(left, right, p, workers);
}

struct SignHistogram {
  double pos = 0.0;
  double neg = 0.0;
  double zero = 0.0;
  double invalid = 0.0;
};

// Fractions of all pixels, partitioning 1 exactly; |d| <= zero_band counts
// as zero. A zero-area map reports invalid = 1.
SignHistogram disparity_sign_histogram(const DisparityMap& d, double zero_band = 0.5);

enum class StereoFormatLabel { Parallel, Converged, PseudoStereo, Unknown };

const char* to_string(StereoFormatLabel label);

struct FormatStats {
  double pos_fraction = 0.0;  // of valid matched pixels, beyond the zero band
  double neg_fraction = 0.0;
  double disparity_variance_px2 = 0.0;
  double vertical_disparity_mean_px = 0.0;  // mean |dy| of the best match
  double confidence = 0.0;
};

struct FormatVerdict {
  StereoFormatLabel label = StereoFormatLabel::Unknown;
  FormatStats stats;
};

struct ClassifyParams {
  double v_min = 1.0;      // px^2, variance floor separating shift from geometry
  double s_min = 0.05;     // minority-sign fraction marking a real zero-disparity plane
  double zero_band = 0.5;  // px
  int min_valid = 200;     // matched pixels required across sampled frames
  BlockMatchParams match{.max_abs_disp = 24, .block = 9, .vertical_range = 1};
};

// Aggregates block-match disparities over frames sampled at stride
// max(1, N/8) and applies the declared decision rule:
//   PseudoStereo: variance < v_min and one sign dominates,
//   Converged:    both signs exceed s_min,
//   Parallel:     one sign dominates with variance >= v_min,
//   Unknown:      otherwise.
FormatVerdict classify_format(const Clip& left, const Clip& right,
                              const ClassifyParams& params = {}, int workers = 0);

}  // namespace stereoscope
