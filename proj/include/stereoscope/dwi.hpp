#pragma once

#include <string>
#include <variant>
#include <vector>

#include "stereoscope/geometry.hpp"
#include "stereoscope/image.hpp"
#include "stereoscope/pipeline.hpp"
#include "stereoscope/scene.hpp"

namespace stereoscope {

struct WarpResult {
  Frame image;    // black under holes until inpainted
  Mask holes;     // true = no source pixel landed
  DepthMap zbuf;  // depth of the winning source pixel; invalid <=> hole
};

enum class WarpDirection { LeftToRight, RightToLeft };

struct HorizontalExtend {};
struct ConstantFill {
  Rgb rgb;
};
using InpaintStrategy = std::variant<HorizontalExtend, ConstantFill>;

// Forward warp by per-pixel disparity d = f*B/Z: each source pixel (x, y)
// splats to the nearest integer column of (x - d, y) (x + d for
// RightToLeft). Conflicts resolve to the smaller depth; exact depth ties to
// the larger source x. Parallel rigs only: a converged rig raises
// FormatMismatch (the inverse depth-disparity relation does not hold there).
// Non-positive or invalid source depths are skipped, as are pixels cleared
// in source_valid when given.
WarpResult forward_warp(const Frame& source, const DepthMap& depth, const CameraRig& rig,
                        WarpDirection direction = WarpDirection::LeftToRight,
                        const Mask* source_valid = nullptr);

// HorizontalExtend fills each hole, per row, from the nearest valid pixel on
// the disocclusion side (higher x for LeftToRight); a hole run touching that
// edge falls back to the other side, and an all-hole row falls back to
// mid-gray. ConstantFill writes the given color.
Frame inpaint_holes(const WarpResult& warp, const InpaintStrategy& strategy,
                    WarpDirection direction = WarpDirection::LeftToRight);

// Per-frame warp + inpaint; frames are independent (no temporal model).
// holes_out, when given, receives one hole mask per frame.
Clip dwi_convert(const Clip& left, const std::vector<DepthMap>& depth, const CameraRig& rig,
                 const InpaintStrategy& strategy, int workers = 0,
                 std::vector<Mask>* holes_out = nullptr);

// Quantifies the single-depth failure on a mirror scene: the disparity the
// warp applies (f*B/d_S from the surface layer) against the oracle's true
// correspondence disparity, split into the mirror region and its complement.
// The shift fields are the mean true displacements of each region.
struct AmbiguityReport {
  double mirror_mae_px = 0.0;
  double frame_mae_px = 0.0;
  double mirror_shift_px = 0.0;
  double frame_shift_px = 0.0;
  std::string verdict;
};

AmbiguityReport ambiguity_report(const Scene& scene, const CameraRig& rig, int workers = 0);

}  // namespace stereoscope
