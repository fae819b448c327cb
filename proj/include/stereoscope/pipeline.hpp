#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stereoscope/image.hpp"

namespace stereoscope {

struct ClipManifest {
  int width = 0;
  int height = 0;
  double fps = 16.0;
  int frame_count = 0;
  std::string eye = "mono";            // left | right | sbs | mono
  std::string format_tag = "unknown";  // parallel | converged | unknown
  std::string source_id;
  // For 16-bit PNG depth sequences: meters = raw / depth_scale. 0 = unset.
  double depth_scale = 0.0;
};

struct Clip {
  std::vector<Frame> frames;
  double fps = 16.0;
  ClipManifest manifest;

  int width() const { return frames.empty() ? manifest.width : frames.front().width; }
  int height() const { return frames.empty() ? manifest.height : frames.front().height; }
  int frame_count() const { return static_cast<int>(frames.size()); }

  // Refreshes the size/count/fps fields of the manifest from the content.
  void sync_manifest();
  // Throws SizeMismatch / ManifestMismatch when content and manifest disagree.
  void validate() const;
};

struct CropRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool operator==(const CropRect&) const = default;
};

// SBS frame packing: left = columns [0, W/2), right = [W/2, W).
std::pair<Frame, Frame> split_sbs(const Frame& frame);
Frame join_sbs(const Frame& left, const Frame& right);
std::pair<Clip, Clip> split_sbs_clip(const Clip& clip);
Clip join_sbs_clip(const Clip& left, const Clip& right);

// Largest symmetric border band whose every row/column has mean luma
// <= luma_thresh in >= frame_frac of the frames. The caller applies the
// returned rect to both eyes.
CropRect detect_black_borders(const Clip& clip, double luma_thresh = 8.0 / 255.0,
                              double frame_frac = 0.99);

Frame crop_frame(const Frame& frame, const CropRect& rect);
Clip crop_clip(const Clip& clip, const CropRect& rect);

// Cut at index i when the mean absolute luma difference between frames
// i-1 and i exceeds threshold. Fewer than two frames -> no cuts.
std::vector<int> detect_shot_cuts(const Clip& clip, double threshold = 0.3);

// Nearest-frame resampling without interpolation: output frame k is input
// frame round(k * src_fps / target), clamped; output length preserves the
// clip duration (round(N * target / src_fps)).
Clip resample_fps(const Clip& clip, double target_fps = 16.0);

// Consecutive non-overlapping windows of exactly seg_len frames; a short
// tail is dropped. keep_odd retains only 1-based odd-indexed segments.
std::vector<Clip> segment_clips(const Clip& clip, int seg_len = 81, bool keep_odd = true);

// Clip directory layout: manifest.json + frame_%06d.png (or .pfm).
Clip load_clip(const std::filesystem::path& dir);
void save_clip(const Clip& clip, const std::filesystem::path& dir,
               const std::string& codec = "png");

// Depth sequence: frame_%06d.pfm (values <= 0 or non-finite invalid) or
// 16-bit gray PNG scaled by the manifest depth_scale (raw 0 invalid).
std::vector<DepthMap> load_depth_sequence(const std::filesystem::path& dir);
void save_depth_sequence(const std::vector<DepthMap>& depths, double fps,
                         const std::filesystem::path& dir);

}  // namespace stereoscope
