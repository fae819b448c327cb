#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "stereoscope/image_io.hpp"
#include "stereoscope/pipeline.hpp"
#include "support/test_support.hpp"

using namespace stereoscope;
using namespace testsupport;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("stereoscope_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Frame bordered_frame(int w, int h, int bx_left, int bx_right, int by = 0) {
  Frame f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool border = x < bx_left || x >= w - bx_right || y < by || y >= h - by;
      f.set(x, y, border ? Rgb{0, 0, 0} : Rgb{0.8f, 0.7f, 0.6f});
    }
  return f;
}

}  // namespace

TEST_CASE("sbs split and join") {
  Frame sbs = random_frame(1664, 480, 71);
  auto [left, right] = split_sbs(sbs);
  CHECK(left.width == 832);
  CHECK(right.width == 832);
  CHECK(left.height == 480);
  Frame joined = join_sbs(left, right);
  CHECK(joined.rgb == sbs.rgb);

  try {
    split_sbs(random_frame(833, 480, 72));
    FAIL("expected OddWidth");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OddWidth);
  }

  Clip clip = frames_to_clip({random_frame(64, 16, 73), random_frame(64, 16, 74)});
  auto [lc, rc] = split_sbs_clip(clip);
  CHECK(lc.manifest.eye == "left");
  CHECK(rc.manifest.eye == "right");
  Clip back = join_sbs_clip(lc, rc);
  CHECK(back.manifest.eye == "sbs");
  CHECK(back.frames[0].rgb == clip.frames[0].rgb);
  CHECK(back.frames[1].rgb == clip.frames[1].rgb);
}

TEST_CASE("black border detection") {
  SUBCASE("symmetric 16 px bands are found exactly") {
    Clip clip = frames_to_clip({bordered_frame(128, 72, 16, 16), bordered_frame(128, 72, 16, 16)});
    CropRect r = detect_black_borders(clip);
    CHECK(r == CropRect{16, 0, 112, 72});
  }
  SUBCASE("borderless clips return the full frame") {
    Clip clip = frames_to_clip({bordered_frame(128, 72, 0, 0)});
    CHECK(detect_black_borders(clip) == CropRect{0, 0, 128, 72});
  }
  SUBCASE("asymmetric 10/20 bands crop the symmetric minimum") {
    Clip clip = frames_to_clip({bordered_frame(128, 72, 10, 20)});
    CropRect r = detect_black_borders(clip);
    CHECK(r == CropRect{10, 0, 118, 72});
  }
  SUBCASE("an all-black clip is degenerate") {
    Frame black(64, 48);
    try {
      detect_black_borders(frames_to_clip({black}));
      FAIL("expected AllBlack");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AllBlack);
    }
  }
  SUBCASE("crop then re-detect reaches the full-frame fixed point") {
    Clip clip = frames_to_clip({bordered_frame(128, 72, 16, 16, 8)});
    CropRect r = detect_black_borders(clip);
    Clip cropped = crop_clip(clip, r);
    CHECK(detect_black_borders(cropped) ==
          CropRect{0, 0, cropped.width(), cropped.height()});
  }
}

TEST_CASE("shot cut detection") {
  Frame dark(32, 24), bright(32, 24);
  for (float& v : bright.rgb) v = 1.0f;

  std::vector<Frame> frames(80, dark);
  for (int i = 40; i < 80; ++i) frames[i] = bright;
  CHECK(detect_shot_cuts(frames_to_clip(std::move(frames))) == std::vector<int>{40});

  CHECK(detect_shot_cuts(frames_to_clip({dark, dark, dark})).empty());

  std::vector<Frame> two{dark, dark, bright, bright, dark};
  CHECK(detect_shot_cuts(frames_to_clip(std::move(two))) == std::vector<int>{2, 4});
}

TEST_CASE("fps resampling") {
  std::vector<Frame> frames;
  for (int i = 0; i < 10; ++i) frames.push_back(provenance_frame(8, 4 + i % 2 * 0));
  for (int i = 0; i < 10; ++i) frames[i].set(0, 0, {static_cast<float>(i) / 16.0f, 0, 0});
  Clip clip = frames_to_clip(std::move(frames), 32.0);

  SUBCASE("32 to 16 fps keeps the even frames") {
    Clip out = resample_fps(clip, 16.0);
    REQUIRE(out.frame_count() == 5);
    for (int k = 0; k < 5; ++k) CHECK(out.frames[k].get(0, 0).r == clip.frames[2 * k].get(0, 0).r);
    CHECK(out.fps == 16.0);
    CHECK(out.manifest.fps == 16.0);
  }
  SUBCASE("matching rates are the identity") {
    Clip out = resample_fps(clip, 32.0);
    REQUIRE(out.frame_count() == 10);
    for (int k = 0; k < 10; ++k) CHECK(out.frames[k].get(0, 0).r == clip.frames[k].get(0, 0).r);
  }
  SUBCASE("24 to 16 fps follows the rounded index map") {
    std::vector<Frame> f24;
    for (int i = 0; i < 24; ++i) {
      Frame f(4, 4);
      f.set(0, 0, {static_cast<float>(i) / 32.0f, 0, 0});
      f24.push_back(std::move(f));
    }
    Clip src = frames_to_clip(std::move(f24), 24.0);
    Clip out = resample_fps(src, 16.0);
    REQUIRE(out.frame_count() == 16);
    for (int k = 0; k < 16; ++k) {
      int expect = std::min(static_cast<int>(std::lround(k * 24.0 / 16.0)), 23);
      CHECK(out.frames[k].get(0, 0).r == src.frames[expect].get(0, 0).r);
    }
  }
}

TEST_CASE("segmentation windows and the odd-index rule") {
  auto numbered = [](int n) {
    std::vector<Frame> frames;
    for (int i = 0; i < n; ++i) {
      Frame f(4, 4);
      f.set(0, 0, {static_cast<float>(i % 256) / 256.0f, 0, 0});
      frames.push_back(std::move(f));
    }
    return frames_to_clip(std::move(frames));
  };

  std::vector<Clip> segs = segment_clips(numbered(200), 81, true);
  REQUIRE(segs.size() == 1);  // floor(200/81) = 2 windows; keep #1
  CHECK(segs[0].frame_count() == 81);
  CHECK(segs[0].frames[0].get(0, 0).r == numbered(200).frames[0].get(0, 0).r);

  CHECK(segment_clips(numbered(80), 81, true).empty());
  CHECK(segment_clips(numbered(243), 81, false).size() == 3);

  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    int n = static_cast<int>(rng() % 400);
    int windows = n / 81;
    size_t expect = static_cast<size_t>((windows + 1) / 2);
    CHECK(segment_clips(numbered(n), 81, true).size() == expect);
    for (const Clip& c : segment_clips(numbered(n), 81, true))
      CHECK(c.frame_count() == 81);
  }
}

TEST_CASE("clip save/load round trip is byte-stable") {
  TempDir tmp;
  Clip clip = frames_to_clip({random_frame(48, 32, 91), random_frame(48, 32, 92)});
  clip.manifest.eye = "left";
  clip.manifest.source_id = "unit";
  save_clip(clip, tmp.path / "a");
  Clip loaded = load_clip(tmp.path / "a");
  CHECK(loaded.manifest.eye == "left");
  CHECK(loaded.manifest.source_id == "unit");
  CHECK(loaded.frame_count() == 2);
  save_clip(loaded, tmp.path / "b");
  CHECK(file_bytes(tmp.path / "a" / "frame_000000.png") ==
        file_bytes(tmp.path / "b" / "frame_000000.png"));
  CHECK(file_bytes(tmp.path / "a" / "frame_000001.png") ==
        file_bytes(tmp.path / "b" / "frame_000001.png"));
}

TEST_CASE("clip loading reports manifest and frame problems") {
  TempDir tmp;
  Clip clip = frames_to_clip({random_frame(32, 32, 93), random_frame(32, 32, 94),
                              random_frame(32, 32, 95)});
  save_clip(clip, tmp.path / "c");

  SUBCASE("missing manifest") {
    fs::remove(tmp.path / "c" / "manifest.json");
    CHECK_THROWS_AS(load_clip(tmp.path / "c"), Error);
  }
  SUBCASE("frame count off by one") {
    fs::remove(tmp.path / "c" / "frame_000002.png");
    try {
      load_clip(tmp.path / "c");
      FAIL("expected ManifestMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ManifestMismatch);
    }
  }
  SUBCASE("numbering gap") {
    fs::remove(tmp.path / "c" / "frame_000001.png");
    try {
      load_clip(tmp.path / "c");
      FAIL("expected MissingFrame");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingFrame);
    }
  }
  SUBCASE("corrupt frame") {
    std::ofstream out(tmp.path / "c" / "frame_000001.png", std::ios::binary);
    out << "not a png";
    out.close();
    try {
      load_clip(tmp.path / "c");
      FAIL("expected UnreadableFrame");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnreadableFrame);
    }
  }
}

TEST_CASE("pfm round trips preserve values and validity") {
  TempDir tmp;
  ScalarField field(20, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x)
      if ((x + y) % 3 != 0) field.set(x, y, -3.0 + 0.37 * x + 1.21 * y);
  write_pfm(tmp.path / "f.pfm", field);
  ScalarField back = read_pfm_scalar(tmp.path / "f.pfm");
  REQUIRE(back.width == 20);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) {
      CHECK(back.is_valid(x, y) == field.is_valid(x, y));
      if (field.is_valid(x, y))
        CHECK(back.at(x, y) == doctest::Approx(field.at(x, y)).epsilon(1e-6));
    }

  Frame f = random_frame(24, 16, 96);
  write_pfm_frame(tmp.path / "f2.pfm", f);
  Frame f2 = read_pfm_frame(tmp.path / "f2.pfm");
  CHECK(f2.rgb == f.rgb);
}

TEST_CASE("depth sequences load from pfm and scaled 16-bit png") {
  TempDir tmp;
  DepthMap d(16, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x)
      if (x != 3) d.set(x, y, 1.0 + 0.5 * x);
  save_depth_sequence({d, d}, 16.0, tmp.path / "pfm");
  std::vector<DepthMap> back = load_depth_sequence(tmp.path / "pfm");
  REQUIRE(back.size() == 2);
  CHECK(!back[0].is_valid(3, 0));
  CHECK(back[0].at(5, 2) == doctest::Approx(3.5).epsilon(1e-6));

  // 16-bit PNG depth: meters = raw / depth_scale, raw 0 invalid.
  fs::create_directories(tmp.path / "png16");
  Gray16 g{16, 8, std::vector<uint16_t>(16 * 8, 0)};
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x)
      if (x != 5) g.v[y * 16 + x] = static_cast<uint16_t>(1000 * (1 + x));
  write_png16_gray(tmp.path / "png16" / "frame_000000.png", g);
  std::ofstream mf(tmp.path / "png16" / "manifest.json");
  mf << R"({"width":16,"height":8,"fps":16,"frame_count":1,"eye":"mono",)"
     << R"("format_tag":"unknown","source_id":"t","depth_scale":500.0})";
  mf.close();
  std::vector<DepthMap> fromPng = load_depth_sequence(tmp.path / "png16");
  REQUIRE(fromPng.size() == 1);
  CHECK(!fromPng[0].is_valid(5, 0));
  CHECK(fromPng[0].at(0, 0) == doctest::Approx(2.0));   // 1000/500
  CHECK(fromPng[0].at(9, 3) == doctest::Approx(20.0));  // 10000/500
}
