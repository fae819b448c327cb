#pragma once

#include <functional>
#include <vector>

#include "stereoscope/dwi.hpp"
#include "stereoscope/image.hpp"
#include "stereoscope/pipeline.hpp"

namespace stereoscope {

// Masks passed to metrics are validity masks: true = include the pixel.

// 10*log10(1/MSE) over RGB, L = 1. Identical inputs return +infinity.
double psnr(const Frame& a, const Frame& b, const Mask* valid = nullptr);

// SSIM on Rec.601 luma: 11x11 Gaussian window (sigma 1.5), K1=0.01,
// K2=0.03, L=1, averaged over windows fully inside the image. With a mask,
// only windows whose every pixel is valid contribute.
double ssim(const Frame& a, const Frame& b, const Mask* valid = nullptr);

// MS-SSIM with dyadic 2x2-mean downsampling. For 5 scales the canonical
// weights (0.0448, 0.2856, 0.3001, 0.2363, 0.1333) are used as published;
// for fewer scales the leading weights are renormalized to sum 1, so a
// single scale reduces to plain SSIM.
double ms_ssim(const Frame& a, const Frame& b, int scales = 5);

// Mean |est - gt| over jointly valid (and region-selected) pixels.
double disparity_mae(const DisparityMap& est, const DisparityMap& gt,
                     const Mask* region = nullptr);

// A warp that also consumes a source-validity mask so hole provenance
// composes through round trips.
using WarpFn = std::function<WarpResult(const Frame&, const Mask& source_valid)>;

// Mean squared error ||left - rl(lr(left))||^2 over pixels valid through
// both warps.
double cycle_residual(const Frame& left, const WarpFn& lr, const WarpFn& rl);

// recon_l2r + recon_r2l + lambda * cycle; all terms must be >= 0.
double combined_loss(double recon_l2r, double recon_r2l, double cycle, double lambda = 0.5);

struct FrameMetrics {
  double psnr_db = 0.0;
  double ssim = 0.0;
  double ms_ssim = 0.0;
};

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
  double ms_ssim = 0.0;
  std::vector<FrameMetrics> per_frame;
  double valid_fraction = 1.0;
  int ms_scales = 5;
};

// Video-level metrics: the aggregate of each metric is the mean of the
// per-frame values. valid_masks, when given, must have one entry per frame.
MetricReport clip_metrics(const Clip& a, const Clip& b,
                          const std::vector<Mask>* valid_masks = nullptr, int ms_scales = 5,
                          int workers = 0);

// Largest MS-SSIM scale count (capped at 5) usable for the given frame size,
// or 0 when even plain SSIM does not fit.
int max_ms_scales(int width, int height);

}  // namespace stereoscope
