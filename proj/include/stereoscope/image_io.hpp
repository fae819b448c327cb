#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "stereoscope/image.hpp"

namespace stereoscope {

// 8-bit RGB PNG with fixed encoder settings, so identical pixels produce
// identical bytes.
void write_png(const std::filesystem::path& path, const Frame& frame);
Frame read_png_frame(const std::filesystem::path& path);

// 8-bit gray PNG; nonzero = true.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_png(const std::filesystem::path& path);

struct Gray16 {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> v;
};

Gray16 read_png16_gray(const std::filesystem::path& path);
void write_png16_gray(const std::filesystem::path& path, const Gray16& img);

// PFM, bottom-to-top rows, scale -1.0 (little-endian floats). Scalar fields
// use 'Pf' with invalid pixels stored as NaN; frames use 'PF'.
void write_pfm(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_pfm_scalar(const std::filesystem::path& path);
void write_pfm_frame(const std::filesystem::path& path, const Frame& frame);
Frame read_pfm_frame(const std::filesystem::path& path);

}  // namespace stereoscope
