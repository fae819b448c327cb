#include "stereoscope/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>

#include "stereoscope/image_io.hpp"

namespace stereoscope {

namespace fs = std::filesystem;
using nlohmann::json;

void Clip::sync_manifest() {
  manifest.frame_count = frame_count();
  manifest.fps = fps;
  if (!frames.empty()) {
    manifest.width = frames.front().width;
    manifest.height = frames.front().height;
  }
}

void Clip::validate() const {
  for (const Frame& f : frames)
    if (!f.same_size(frames.front()))
      throw Error(ErrorKind::SizeMismatch, "frames in a clip must share one size");
  if (!(fps > 0)) throw Error(ErrorKind::InvalidArgument, "fps must be > 0");
  if (manifest.frame_count != frame_count())
    throw Error(ErrorKind::ManifestMismatch, "manifest frame_count differs from content");
  if (!frames.empty() &&
      (manifest.width != frames.front().width || manifest.height != frames.front().height))
    throw Error(ErrorKind::ManifestMismatch, "manifest dimensions differ from content");
}

std::pair<Frame, Frame> split_sbs(const Frame& frame) {
  if (frame.width % 2 != 0)
    throw Error(ErrorKind::OddWidth, "SBS frame width must be even");
  int half = frame.width / 2;
  Frame left(half, frame.height), right(half, frame.height);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < half; ++x) {
      left.set(x, y, frame.get(x, y));
      right.set(x, y, frame.get(x + half, y));
    }
  }
  return {std::move(left), std::move(right)};
}

Frame join_sbs(const Frame& left, const Frame& right) {
  if (!left.same_size(right))
    throw Error(ErrorKind::SizeMismatch, "left/right dimensions differ");
  Frame out(left.width * 2, left.height);
  for (int y = 0; y < left.height; ++y) {
    for (int x = 0; x < left.width; ++x) {
      out.set(x, y, left.get(x, y));
      out.set(x + left.width, y, right.get(x, y));
    }
  }
  return out;
}

std::pair<Clip, Clip> split_sbs_clip(const Clip& clip) {
  Clip left, right;
  left.fps = right.fps = clip.fps;
  left.manifest = right.manifest = clip.manifest;
  left.manifest.eye = "left";
  right.manifest.eye = "right";
  for (const Frame& f : clip.frames) {
    auto [l, r] = split_sbs(f);
    left.frames.push_back(std::move(l));
    right.frames.push_back(std::move(r));
  }
  left.sync_manifest();
  right.sync_manifest();
  return {std::move(left), std::move(right)};
}

Clip join_sbs_clip(const Clip& left, const Clip& right) {
  if (left.frame_count() != right.frame_count())
    throw Error(ErrorKind::LengthMismatch, "left/right frame counts differ");
  Clip out;
  out.fps = left.fps;
  out.manifest = left.manifest;
  out.manifest.eye = "sbs";
  for (int i = 0; i < left.frame_count(); ++i)
    out.frames.push_back(join_sbs(left.frames[i], right.frames[i]));
  out.sync_manifest();
  return out;
}

CropRect detect_black_borders(const Clip& clip, double luma_thresh, double frame_frac) {
  if (clip.frames.empty()) throw Error(ErrorKind::EmptyClip, "no frames");
  const int w = clip.width(), h = clip.height();
  const int n = clip.frame_count();

  std::vector<int> col_black(w, 0), row_black(h, 0);
  for (const Frame& f : clip.frames) {
    for (int x = 0; x < w; ++x) {
      double sum = 0;
      for (int y = 0; y < h; ++y) sum += luma(f, x, y);
      if (sum / h <= luma_thresh) ++col_black[x];
    }
    for (int y = 0; y < h; ++y) {
      double sum = 0;
      for (int x = 0; x < w; ++x) sum += luma(f, x, y);
      if (sum / w <= luma_thresh) ++row_black[y];
    }
  }
  auto is_border = [&](int black_count) {
    return static_cast<double>(black_count) / n >= frame_frac;
  };
  int left = 0;
  while (left < w && is_border(col_black[left])) ++left;
  int right = 0;
  while (right < w && is_border(col_black[w - 1 - right])) ++right;
  int top = 0;
  while (top < h && is_border(row_black[top])) ++top;
  int bottom = 0;
  while (bottom < h && is_border(row_black[h - 1 - bottom])) ++bottom;

  // Largest symmetric band: the smaller run on each axis.
  int bx = std::min(left, right);
  int by = std::min(top, bottom);
  if (2 * bx >= w || 2 * by >= h)
    throw Error(ErrorKind::AllBlack, "borders meet: the clip is effectively black");
  return {bx, by, w - bx, h - by};
}

Frame crop_frame(const Frame& frame, const CropRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > frame.width || rect.y1 > frame.height ||
      rect.x0 >= rect.x1 || rect.y0 >= rect.y1)
    throw Error(ErrorKind::InvalidArgument, "crop rect out of bounds");
  Frame out(rect.width(), rect.height());
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) out.set(x, y, frame.get(x + rect.x0, y + rect.y0));
  return out;
}

Clip crop_clip(const Clip& clip, const CropRect& rect) {
  Clip out;
  out.fps = clip.fps;
  out.manifest = clip.manifest;
  for (const Frame& f : clip.frames) out.frames.push_back(crop_frame(f, rect));
  out.sync_manifest();
  return out;
}

std::vector<int> detect_shot_cuts(const Clip& clip, double threshold) {
  std::vector<int> cuts;
  for (int i = 1; i < clip.frame_count(); ++i) {
    const Frame& a = clip.frames[i - 1];
    const Frame& b = clip.frames[i];
    double sum = 0;
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x) sum += std::abs(luma(a, x, y) - luma(b, x, y));
    if (sum / (static_cast<double>(a.width) * a.height) > threshold) cuts.push_back(i);
  }
  return cuts;
}

Clip resample_fps(const Clip& clip, double target_fps) {
  if (!(target_fps > 0)) throw Error(ErrorKind::InvalidArgument, "target fps must be > 0");
  const int n = clip.frame_count();
  Clip out;
  out.fps = target_fps;
  out.manifest = clip.manifest;
  if (n == 0) {
    out.sync_manifest();
    return out;
  }
  // Duration-preserving nearest-frame map; no interpolation.
  int out_count = static_cast<int>(std::lround(n * target_fps / clip.fps));
  out_count = std::max(out_count, 1);
  double step = clip.fps / target_fps;
  for (int k = 0; k < out_count; ++k) {
    int src = static_cast<int>(std::lround(k * step));
    src = std::clamp(src, 0, n - 1);
    out.frames.push_back(clip.frames[src]);
  }
  out.sync_manifest();
  return out;
}

std::vector<Clip> segment_clips(const Clip& clip, int seg_len, bool keep_odd) {
  if (seg_len < 1) throw Error(ErrorKind::InvalidArgument, "segment length must be >= 1");
  std::vector<Clip> segments;
  int count = clip.frame_count() / seg_len;  // short tail dropped
  for (int s = 0; s < count; ++s) {
    if (keep_odd && (s + 1) % 2 == 0) continue;  // 1-based odd segments only
    Clip seg;
    seg.fps = clip.fps;
    seg.manifest = clip.manifest;
    seg.frames.assign(clip.frames.begin() + static_cast<ptrdiff_t>(s) * seg_len,
                      clip.frames.begin() + static_cast<ptrdiff_t>(s + 1) * seg_len);
    seg.sync_manifest();
    segments.push_back(std::move(seg));
  }
  return segments;
}

namespace {

json manifest_to_json(const ClipManifest& m) {
  json j{{"width", m.width},       {"height", m.height},
         {"fps", m.fps},           {"frame_count", m.frame_count},
         {"eye", m.eye},           {"format_tag", m.format_tag},
         {"source_id", m.source_id}};
  if (m.depth_scale > 0) j["depth_scale"] = m.depth_scale;
  return j;
}

ClipManifest manifest_from_json(const json& j) {
  ClipManifest m;
  m.width = j.at("width").get<int>();
  m.height = j.at("height").get<int>();
  m.fps = j.at("fps").get<double>();
  m.frame_count = j.at("frame_count").get<int>();
  m.eye = j.value("eye", "mono");
  m.format_tag = j.value("format_tag", "unknown");
  m.source_id = j.value("source_id", "");
  m.depth_scale = j.value("depth_scale", 0.0);
  return m;
}

ClipManifest load_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorKind::ManifestMismatch, "manifest.json missing in " + dir.string());
  json j;
  try {
    in >> j;
    return manifest_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ManifestMismatch, "bad manifest in " + dir.string() + ": " + e.what());
  }
}

// Indexed frame files (frame_000000.png / .pfm), checked for numbering gaps.
std::vector<fs::path> list_frame_files(const fs::path& dir) {
  static const std::regex pattern(R"(frame_(\d{6})\.(png|pfm))");
  std::map<int, fs::path> indexed;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) indexed[std::stoi(m[1])] = entry.path();
  }
  std::vector<fs::path> files;
  int expected = 0;
  for (const auto& [idx, path] : indexed) {
    if (idx != expected)
      throw Error(ErrorKind::MissingFrame,
                  "frame index gap: expected " + std::to_string(expected) + " in " + dir.string());
    files.push_back(path);
    ++expected;
  }
  return files;
}

}  // namespace

Clip load_clip(const fs::path& dir) {
  Clip clip;
  clip.manifest = load_manifest(dir);
  clip.fps = clip.manifest.fps;
  for (const fs::path& file : list_frame_files(dir)) {
    Frame f = (file.extension() == ".pfm") ? read_pfm_frame(file) : read_png_frame(file);
    clip.frames.push_back(std::move(f));
  }
  if (clip.frame_count() != clip.manifest.frame_count)
    throw Error(ErrorKind::ManifestMismatch,
                "manifest frame_count " + std::to_string(clip.manifest.frame_count) +
                    " but found " + std::to_string(clip.frame_count()));
  clip.validate();
  return clip;
}

void save_clip(const Clip& clip, const fs::path& dir, const std::string& codec) {
  if (codec != "png" && codec != "pfm")
    throw Error(ErrorKind::InvalidArgument, "codec must be png or pfm");
  Clip copy_meta = clip;  // manifests are kept in sync with what lands on disk
  copy_meta.sync_manifest();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string());
  for (int i = 0; i < clip.frame_count(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06d.%s", i, codec.c_str());
    if (codec == "png") {
      write_png(dir / name, clip.frames[i]);
    } else {
      write_pfm_frame(dir / name, clip.frames[i]);
    }
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest in " + dir.string());
  out << manifest_to_json(copy_meta.manifest).dump(2) << "\n";
}

std::vector<DepthMap> load_depth_sequence(const fs::path& dir) {
  ClipManifest manifest = load_manifest(dir);
  std::vector<DepthMap> depths;
  for (const fs::path& file : list_frame_files(dir)) {
    if (file.extension() == ".pfm") {
      DepthMap d = read_pfm_scalar(file);
      for (int y = 0; y < d.height; ++y)
        for (int x = 0; x < d.width; ++x)
          if (d.is_valid(x, y) && !(d.at(x, y) > 0)) d.set_invalid(x, y);
      depths.push_back(std::move(d));
    } else {
      if (!(manifest.depth_scale > 0))
        throw Error(ErrorKind::ManifestMismatch,
                    "16-bit PNG depth needs a positive depth_scale in the manifest");
      Gray16 raw = read_png16_gray(file);
      DepthMap d(raw.width, raw.height);
      for (int y = 0; y < raw.height; ++y)
        for (int x = 0; x < raw.width; ++x) {
          uint16_t v = raw.v[static_cast<size_t>(y) * raw.width + x];
          if (v != 0) d.set(x, y, v / manifest.depth_scale);
        }
      depths.push_back(std::move(d));
    }
  }
  if (static_cast<int>(depths.size()) != manifest.frame_count)
    throw Error(ErrorKind::ManifestMismatch, "depth frame count differs from manifest");
  return depths;
}

void save_depth_sequence(const std::vector<DepthMap>& depths, double fps, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string());
  ClipManifest m;
  m.fps = fps;
  m.frame_count = static_cast<int>(depths.size());
  m.eye = "mono";
  if (!depths.empty()) {
    m.width = depths.front().width;
    m.height = depths.front().height;
  }
  for (size_t i = 0; i < depths.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.pfm", i);
    write_pfm(dir / name, depths[i]);
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest in " + dir.string());
  out << manifest_to_json(m).dump(2) << "\n";
}

}  // namespace stereoscope
