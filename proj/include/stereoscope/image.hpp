#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stereoscope/error.hpp"

namespace stereoscope {

struct Rgb {
  float r = 0.0f, g = 0.0f, b = 0.0f;
};

// H x W x 3 image, values in [0,1], row-major, origin top-left, y down.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;  // width * height * 3

  Frame() = default;
  Frame(int w, int h, Rgb fill = {}) : width(w), height(h) {
    rgb.assign(static_cast<size_t>(w) * h * 3, 0.0f);
    if (fill.r != 0.0f || fill.g != 0.0f || fill.b != 0.0f) {
      for (size_t i = 0; i < rgb.size(); i += 3) {
        rgb[i] = fill.r;
        rgb[i + 1] = fill.g;
        rgb[i + 2] = fill.b;
      }
    }
  }

  float& at(int x, int y, int c) { return rgb[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  float at(int x, int y, int c) const { return rgb[(static_cast<size_t>(y) * width + x) * 3 + c]; }

  Rgb get(int x, int y) const {
    size_t i = (static_cast<size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(int x, int y, const Rgb& v) {
    size_t i = (static_cast<size_t>(y) * width + x) * 3;
    rgb[i] = v.r;
    rgb[i + 1] = v.g;
    rgb[i + 2] = v.b;
  }

  bool same_size(const Frame& o) const { return width == o.width && height == o.height; }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> v;

  Mask() = default;
  Mask(int w, int h, bool fill = false)
      : width(w), height(h), v(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return v[static_cast<size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool b) { v[static_cast<size_t>(y) * width + x] = b ? 1 : 0; }

  size_t count_true() const {
    size_t n = 0;
    for (uint8_t b : v) n += (b != 0);
    return n;
  }
};

// Per-pixel scalar with a validity mask. Used for depths (meters) and
// disparities (pixels).
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<double> value;
  std::vector<uint8_t> valid;

  ScalarField() = default;
  ScalarField(int w, int h)
      : width(w),
        height(h),
        value(static_cast<size_t>(w) * h, 0.0),
        valid(static_cast<size_t>(w) * h, 0) {}

  double at(int x, int y) const { return value[static_cast<size_t>(y) * width + x]; }
  bool is_valid(int x, int y) const { return valid[static_cast<size_t>(y) * width + x] != 0; }
  void set(int x, int y, double d) {
    size_t i = static_cast<size_t>(y) * width + x;
    value[i] = d;
    valid[i] = 1;
  }
  void set_invalid(int x, int y) {
    size_t i = static_cast<size_t>(y) * width + x;
    value[i] = 0.0;
    valid[i] = 0;
  }
  size_t count_valid() const {
    size_t n = 0;
    for (uint8_t b : valid) n += (b != 0);
    return n;
  }
};

using DepthMap = ScalarField;
using DisparityMap = ScalarField;

// Rec.601 luma; the single definition shared by metrics and the pipeline.
inline double luma(float r, float g, float b) {
  return 0.299 * static_cast<double>(r) + 0.587 * static_cast<double>(g) +
         0.114 * static_cast<double>(b);
}

inline double luma(const Frame& f, int x, int y) {
  return luma(f.at(x, y, 0), f.at(x, y, 1), f.at(x, y, 2));
}

}  // namespace stereoscope
