#include "stereoscope/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace stereoscope {

namespace {

struct FileCloser {
  FILE* fp = nullptr;
  ~FileCloser() {
    if (fp) std::fclose(fp);
  }
};

uint8_t quantize8(float v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace

void write_png(const std::filesystem::path& path, const Frame& frame) {
  FileCloser f{std::fopen(path.string().c_str(), "wb")};
  if (!f.fp) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  std::vector<uint8_t> data(static_cast<size_t>(frame.width) * frame.height * 3);
  std::vector<png_bytep> rows(frame.height);
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "PNG write failed: " + path.string());
  }
  png_init_io(png, f.fp);
  // Fixed encoder settings keep identical pixels byte-identical on disk.
  png_set_compression_level(png, 6);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_IHDR(png, info, frame.width, frame.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x)
      for (int c = 0; c < 3; ++c)
        data[(static_cast<size_t>(y) * frame.width + x) * 3 + c] = quantize8(frame.at(x, y, c));
    rows[y] = &data[static_cast<size_t>(y) * frame.width * 3];
  }
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Frame read_png_frame(const std::filesystem::path& path) {
  FileCloser f{std::fopen(path.string().c_str(), "rb")};
  if (!f.fp) throw Error(ErrorKind::Io, "cannot open: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  std::vector<uint8_t> data;
  std::vector<png_bytep> rows;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::UnreadableFrame, "PNG decode failed: " + path.string());
  }
  png_init_io(png, f.fp);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  int w = static_cast<int>(png_get_image_width(png, info));
  int h = static_cast<int>(png_get_image_height(png, info));
  size_t rowbytes = png_get_rowbytes(png, info);
  data.resize(rowbytes * h);
  rows.resize(h);
  for (int y = 0; y < h; ++y) rows[y] = &data[rowbytes * y];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Frame frame(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        frame.at(x, y, c) = data[rowbytes * y + static_cast<size_t>(x) * 3 + c] / 255.0f;
  return frame;
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  Frame f(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) f.set(x, y, {1.0f, 1.0f, 1.0f});
  write_png(path, f);
}

Mask read_mask_png(const std::filesystem::path& path) {
  Frame f = read_png_frame(path);
  Mask m(f.width, f.height);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) m.set(x, y, f.at(x, y, 0) > 0.0f);
  return m;
}

Gray16 read_png16_gray(const std::filesystem::path& path) {
  FileCloser f{std::fopen(path.string().c_str(), "rb")};
  if (!f.fp) throw Error(ErrorKind::Io, "cannot open: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  std::vector<uint8_t> data;
  std::vector<png_bytep> rows;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::UnreadableFrame, "PNG decode failed: " + path.string());
  }
  png_init_io(png, f.fp);
  png_read_info(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(png, info) != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::UnreadableFrame, "expected 16-bit gray PNG: " + path.string());
  }
  png_set_swap(png);  // file is big-endian
  png_read_update_info(png, info);
  int w = static_cast<int>(png_get_image_width(png, info));
  int h = static_cast<int>(png_get_image_height(png, info));
  size_t rowbytes = png_get_rowbytes(png, info);
  data.resize(rowbytes * h);
  rows.resize(h);
  for (int y = 0; y < h; ++y) rows[y] = &data[rowbytes * y];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Gray16 img{w, h, std::vector<uint16_t>(static_cast<size_t>(w) * h)};
  std::memcpy(img.v.data(), data.data(), img.v.size() * sizeof(uint16_t));
  return img;
}

void write_png16_gray(const std::filesystem::path& path, const Gray16& img) {
  FileCloser f{std::fopen(path.string().c_str(), "wb")};
  if (!f.fp) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  std::vector<png_bytep> rows(img.height);
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "PNG write failed: " + path.string());
  }
  png_init_io(png, f.fp);
  png_set_compression_level(png, 6);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_IHDR(png, info, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);
  for (int y = 0; y < img.height; ++y)
    rows[y] = reinterpret_cast<png_bytep>(
        const_cast<uint16_t*>(&img.v[static_cast<size_t>(y) * img.width]));
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

struct PfmHeader {
  bool color = false;
  int width = 0, height = 0;
  bool little_endian = true;
};

PfmHeader read_pfm_header(std::istream& in, const std::filesystem::path& path) {
  std::string magic;
  double scale = 0;
  PfmHeader h;
  in >> magic >> h.width >> h.height >> scale;
  if (!in || (magic != "Pf" && magic != "PF") || h.width <= 0 || h.height <= 0 || scale == 0)
    throw Error(ErrorKind::UnreadableFrame, "bad PFM header: " + path.string());
  h.color = (magic == "PF");
  h.little_endian = scale < 0;
  in.get();  // single whitespace byte terminating the header
  return h;
}

void byteswap_floats(std::vector<float>& v) {
  for (float& f : v) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    bits = __builtin_bswap32(bits);
    std::memcpy(&f, &bits, 4);
  }
}

std::vector<float> read_pfm_data(std::istream& in, const PfmHeader& h,
                                 const std::filesystem::path& path) {
  size_t n = static_cast<size_t>(h.width) * h.height * (h.color ? 3 : 1);
  std::vector<float> data(n);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw Error(ErrorKind::UnreadableFrame, "truncated PFM: " + path.string());
  if (!h.little_endian) byteswap_floats(data);
  return data;
}

void write_pfm_raw(const std::filesystem::path& path, bool color, int width, int height,
                   const std::vector<float>& bottom_up_rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  out << (color ? "PF" : "Pf") << "\n" << width << " " << height << "\n-1.0\n";
  out.write(reinterpret_cast<const char*>(bottom_up_rows.data()),
            static_cast<std::streamsize>(bottom_up_rows.size() * sizeof(float)));
  if (!out) throw Error(ErrorKind::Io, "PFM write failed: " + path.string());
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const ScalarField& field) {
  std::vector<float> data(static_cast<size_t>(field.width) * field.height);
  size_t i = 0;
  for (int y = field.height - 1; y >= 0; --y)
    for (int x = 0; x < field.width; ++x)
      data[i++] = field.is_valid(x, y) ? static_cast<float>(field.at(x, y))
                                       : std::numeric_limits<float>::quiet_NaN();
  write_pfm_raw(path, false, field.width, field.height, data);
}

ScalarField read_pfm_scalar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open: " + path.string());
  PfmHeader h = read_pfm_header(in, path);
  if (h.color) throw Error(ErrorKind::UnreadableFrame, "expected grayscale PFM: " + path.string());
  std::vector<float> data = read_pfm_data(in, h, path);
  ScalarField field(h.width, h.height);
  size_t i = 0;
  for (int y = h.height - 1; y >= 0; --y)
    for (int x = 0; x < h.width; ++x) {
      float v = data[i++];
      if (std::isfinite(v)) field.set(x, y, v);
    }
  return field;
}

void write_pfm_frame(const std::filesystem::path& path, const Frame& frame) {
  std::vector<float> data(static_cast<size_t>(frame.width) * frame.height * 3);
  size_t i = 0;
  for (int y = frame.height - 1; y >= 0; --y)
    for (int x = 0; x < frame.width; ++x)
      for (int c = 0; c < 3; ++c) data[i++] = frame.at(x, y, c);
  write_pfm_raw(path, true, frame.width, frame.height, data);
}

Frame read_pfm_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open: " + path.string());
  PfmHeader h = read_pfm_header(in, path);
  if (!h.color) throw Error(ErrorKind::UnreadableFrame, "expected color PFM: " + path.string());
  std::vector<float> data = read_pfm_data(in, h, path);
  Frame frame(h.width, h.height);
  size_t i = 0;
  for (int y = h.height - 1; y >= 0; --y)
    for (int x = 0; x < h.width; ++x)
      for (int c = 0; c < 3; ++c) frame.at(x, y, c) = data[i++];
  return frame;
}

}  // namespace stereoscope
