#include <doctest.h>

#include <cmath>
#include <set>

#include "stereoscope/dwi.hpp"
#include "stereoscope/metrics.hpp"
#include "stereoscope/render.hpp"
#include "support/test_support.hpp"

using namespace stereoscope;
using namespace testsupport;

namespace {

CameraRig narrow_rig() { return CameraRig::parallel(0.063, 1000.0, 128, 72, 64.0, 36.0); }

DepthMap constant_depth(int w, int h, double z) {
  DepthMap d(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) d.set(x, y, z);
  return d;
}

}  // namespace

TEST_CASE("constant-depth warp is a uniform shift with right-edge holes") {
  CameraRig rig = narrow_rig();  // fB = 63, Z = 6.3 -> d = 10
  Frame src = provenance_frame(128, 72);
  WarpResult w = forward_warp(src, constant_depth(128, 72, 6.3), rig);
  for (int y = 0; y < 72; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (x >= 118) {
        CHECK(w.holes.at(x, y));
      } else {
        REQUIRE(!w.holes.at(x, y));
        CHECK(w.image.get(x, y).r == src.get(x + 10, y).r);
        CHECK(w.image.get(x, y).g == src.get(x + 10, y).g);
        CHECK(w.zbuf.at(x, y) == 6.3);
      }
    }
  }
  // hole fraction is d/W on every row
  CHECK(w.holes.count_true() == static_cast<size_t>(10) * 72);
}

TEST_CASE("z-buffer resolves overlaps to the nearer layer") {
  CameraRig rig = narrow_rig();
  Frame src(128, 72);
  DepthMap depth(128, 72);
  for (int y = 0; y < 72; ++y)
    for (int x = 0; x < 128; ++x) {
      bool near = x >= 40 && x < 60;
      src.set(x, y, near ? Rgb{1.0f, 0, 0} : Rgb{0, 0, 1.0f});
      depth.set(x, y, near ? 3.15 : 6.3);  // d = 20 vs d = 10
    }
  WarpResult w = forward_warp(src, depth, rig);
  // near layer lands on [20,40); far sources [30,50) collide there and lose
  for (int x = 20; x < 40; ++x) {
    REQUIRE(!w.holes.at(x, 10));
    CHECK(w.image.get(x, 10).r == 1.0f);
    CHECK(w.zbuf.at(x, 10) == 3.15);
  }
}

TEST_CASE("warp mass conservation: one source per landed pixel") {
  CameraRig rig = narrow_rig();
  Frame src = provenance_frame(128, 72);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> zdist(1.5, 20.0);
  DepthMap depth(128, 72);
  for (int y = 0; y < 72; ++y)
    for (int x = 0; x < 128; ++x) depth.set(x, y, zdist(rng));

  WarpResult w = forward_warp(src, depth, rig);
  size_t landed = 0;
  for (int y = 0; y < 72; ++y) {
    std::set<std::pair<int, int>> sources;
    for (int x = 0; x < 128; ++x) {
      if (w.holes.at(x, y)) continue;
      ++landed;
      // provenance colors identify the source pixel uniquely
      int sx = static_cast<int>(std::lround(w.image.get(x, y).r * 128 - 0.5));
      int sy = static_cast<int>(std::lround(w.image.get(x, y).g * 72 - 0.5));
      CHECK(sy == y);
      CHECK(sources.insert({sx, sy}).second);
      // and the winner really maps here
      double d = rig.focal_px * rig.baseline_m / depth.at(sx, sy);
      CHECK(static_cast<int>(std::lround(sx - d)) == x);
    }
  }
  CHECK(landed + w.holes.count_true() == static_cast<size_t>(128) * 72);
}

TEST_CASE("invalid and non-positive depths are skipped, not fatal") {
  CameraRig rig = narrow_rig();
  Frame src = provenance_frame(128, 72);
  DepthMap depth = constant_depth(128, 72, 6.3);
  depth.set(50, 10, -1.0);
  depth.set_invalid(51, 10);
  WarpResult w = forward_warp(src, depth, rig);
  CHECK(w.holes.at(40, 10));  // their targets stay holes
  CHECK(w.holes.at(41, 10));
  CHECK(!w.holes.at(42, 10));
}

TEST_CASE("converged rigs are rejected by the warp") {
  CameraRig conv = CameraRig::converged(0.063, 1000, 128, 72, 64, 36, 3.0);
  Frame src(128, 72);
  try {
    forward_warp(src, constant_depth(128, 72, 4.0), conv);
    FAIL("expected FormatMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FormatMismatch);
  }

  // also through the multi-threaded clip path: worker exceptions must
  // surface as the same typed error
  Clip clip = frames_to_clip({src, src, src, src});
  std::vector<DepthMap> depths(4, constant_depth(128, 72, 4.0));
  try {
    dwi_convert(clip, depths, conv, HorizontalExtend{}, 4);
    FAIL("expected FormatMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FormatMismatch);
  }
}

TEST_CASE("inpainting strategies") {
  WarpResult w;
  w.image = provenance_frame(32, 8);
  w.holes = Mask(32, 8, false);
  w.zbuf = constant_depth(32, 8, 2.0);

  SUBCASE("no holes leaves the image unchanged") {
    Frame out = inpaint_holes(w, HorizontalExtend{});
    CHECK(out.rgb == w.image.rgb);
  }
  SUBCASE("single hole column takes the neighbor on the disocclusion side") {
    for (int y = 0; y < 8; ++y) w.holes.set(10, y, true);
    Frame out = inpaint_holes(w, HorizontalExtend{});
    for (int y = 0; y < 8; ++y) {
      CHECK(out.get(10, y).r == w.image.get(11, y).r);  // filled from higher x
      CHECK(out.get(10, y).g == w.image.get(11, y).g);
    }
  }
  SUBCASE("right-edge holes fall back to the left neighbor") {
    for (int y = 0; y < 8; ++y) w.holes.set(31, y, true);
    Frame out = inpaint_holes(w, HorizontalExtend{});
    for (int y = 0; y < 8; ++y) CHECK(out.get(31, y).r == w.image.get(30, y).r);
  }
  SUBCASE("constant fill and full-frame holes") {
    w.holes = Mask(32, 8, true);
    Frame out = inpaint_holes(w, ConstantFill{{0.5f, 0.5f, 0.5f}});
    for (float v : out.rgb) CHECK(v == 0.5f);
    Frame ext = inpaint_holes(w, HorizontalExtend{});  // all-hole rows: gray fallback
    for (int y = 0; y < 8; ++y) CHECK(ext.get(5, y).r == 0.5f);
  }
}

TEST_CASE("dwi_convert is frame-independent and validates inputs") {
  CameraRig rig = narrow_rig();
  Scene scene = checker_plane_scene(6.3);
  ViewRender left = render_view(scene, rig, Eye::Left);
  Clip clip = frames_to_clip({left.frame, left.frame, left.frame});
  std::vector<DepthMap> depths(3, left.layers.surface);

  std::vector<Mask> holes;
  Clip out = dwi_convert(clip, depths, rig, HorizontalExtend{}, 0, &holes);
  REQUIRE(out.frame_count() == 3);
  CHECK(out.frames[0].rgb == out.frames[1].rgb);
  CHECK(out.frames[1].rgb == out.frames[2].rgb);
  CHECK(out.manifest.eye == "right");
  REQUIRE(holes.size() == 3);

  SUBCASE("a fully invalid depth frame yields a fully inpainted frame") {
    Clip base = dwi_convert(clip, depths, rig, ConstantFill{{0.1f, 0.2f, 0.3f}});
    depths[1] = DepthMap(128, 72);  // all invalid
    Clip out2 = dwi_convert(clip, depths, rig, ConstantFill{{0.1f, 0.2f, 0.3f}});
    for (int x = 0; x < 128; ++x) CHECK(out2.frames[1].get(x, 5).b == 0.3f);
    CHECK(out2.frames[0].rgb == base.frames[0].rgb);  // other frames untouched
  }
  SUBCASE("length and size mismatches raise") {
    depths.pop_back();
    CHECK_THROWS_AS(dwi_convert(clip, depths, rig, HorizontalExtend{}), Error);
    std::vector<DepthMap> bad(3, DepthMap(64, 64));
    CHECK_THROWS_AS(dwi_convert(clip, bad, rig, HorizontalExtend{}), Error);
  }
}

TEST_CASE("integer-disparity warp reproduces the oracle right view bit-exactly") {
  CameraRig rig = narrow_rig();
  RenderOutput oracle = render_stereo(checker_plane_scene(6.3), rig);
  WarpResult w = forward_warp(oracle.left, oracle.layers_left.surface, rig);
  size_t compared = 0;
  for (int y = 0; y < 72; ++y)
    for (int x = 0; x < 128; ++x) {
      if (w.holes.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) CHECK(w.image.at(x, y, c) == oracle.right.at(x, y, c));
      ++compared;
    }
  CHECK(compared == static_cast<size_t>(118) * 72);

  Mask valid = w.holes;
  for (auto& v : valid.v) v = !v;
  CHECK(psnr(w.image, oracle.right, &valid) == std::numeric_limits<double>::infinity());
}

TEST_CASE("dwi clip on a rendered plane scores at least 40 dB outside holes") {
  CameraRig rig = narrow_rig();
  RenderOutput oracle = render_stereo(checker_plane_scene(6.3), rig);
  Clip left = frames_to_clip({oracle.left, oracle.left});
  std::vector<DepthMap> depths(2, oracle.layers_left.surface);
  std::vector<Mask> holes;
  Clip converted = dwi_convert(left, depths, rig, HorizontalExtend{}, 0, &holes);
  for (int i = 0; i < 2; ++i) {
    Mask valid = holes[i];
    for (auto& v : valid.v) v = !v;
    CHECK(psnr(converted.frames[i], oracle.right, &valid) >= 40.0);
  }
}

TEST_CASE("warping mirror content with surface depth misplaces it by fB(1/dS - 1/dR)") {
  CameraRig rig = CameraRig::default_parallel();
  Scene scene = make_mirror_demo_scene(rig);
  RenderOutput oracle = render_stereo(scene, rig);
  const double fb = rig.focal_px * rig.baseline_m;
  const double expected =
      std::abs(fb / kMirrorDemoSurfaceDepthM - fb / kMirrorDemoVirtualDepthM);

  double err_sum = 0;
  int n = 0;
  for (int y = 0; y < rig.height_px; ++y)
    for (int x = 0; x < rig.width_px; ++x) {
      if (!oracle.layers_left.mirror_mask.at(x, y)) continue;
      if (!oracle.gt_disparity_left.is_valid(x, y)) continue;
      double applied = fb / oracle.layers_left.surface.at(x, y);
      err_sum += std::abs(applied - oracle.gt_disparity_left.at(x, y));
      ++n;
    }
  REQUIRE(n > 200);
  CHECK(err_sum / n == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ambiguity report separates mirror and frame behavior") {
  CameraRig rig = CameraRig::default_parallel();
  AmbiguityReport rep = ambiguity_report(make_mirror_demo_scene(rig), rig);
  const double fb = rig.focal_px * rig.baseline_m;
  CHECK(rep.mirror_mae_px ==
        doctest::Approx(fb / kMirrorDemoSurfaceDepthM - fb / kMirrorDemoVirtualDepthM)
            .epsilon(1e-9));
  CHECK(rep.frame_mae_px < 1e-9);
  CHECK(rep.mirror_shift_px == doctest::Approx(fb / kMirrorDemoVirtualDepthM).epsilon(1e-9));
  CHECK(rep.frame_shift_px == doctest::Approx(fb / kMirrorDemoWallDepthM).epsilon(1e-9));
  CHECK(rep.verdict.find("depth ambiguity") != std::string::npos);
}

TEST_CASE("ambiguity grows with the virtual depth") {
  CameraRig rig = CameraRig::default_parallel();
  double prev = -1;
  for (double backdrop_z : {-2.0, -6.0, -10.0}) {  // d_R = 6, 10, 14
    Scene scene = make_mirror_demo_scene(rig);
    for (Primitive& p : scene.primitives)
      if (auto* pl = std::get_if<PlaneShape>(&p.shape); pl && pl->point.z < 0)
        pl->point.z = backdrop_z;
    AmbiguityReport rep = ambiguity_report(scene, rig);
    CHECK(rep.mirror_mae_px > prev);
    prev = rep.mirror_mae_px;
  }
}

TEST_CASE("content on the mirror surface shows no ambiguity") {
  // A floor mirror with a thin strip standing on it: the strip's reflection
  // hugs the contact line, so d_R tracks d_S and the warp error is tiny.
  CameraRig rig = CameraRig::default_parallel();
  Scene scene;
  scene.primitives.push_back({1, PlaneShape{{0, 0.8, 0}, {0, -1, 0}}, MirrorFinish{0.9}});
  scene.primitives.push_back({2, Quad{{-1.5, 0.8, 3.0}, {3.0, 0, 0}, {0, -0.08, 0}},
                              CheckerTexture{{0.9f, 0.6f, 0.2f}, {0.3f, 0.2f, 0.1f}, 0.11}});
  AmbiguityReport rep = ambiguity_report(scene, rig);
  CHECK(rep.mirror_mae_px < 0.25);
}

TEST_CASE("scenes without mirrors are rejected") {
  CameraRig rig = CameraRig::default_parallel();
  try {
    ambiguity_report(checker_plane_scene(4.0), rig);
    FAIL("expected NoMirror");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoMirror);
  }
}

TEST_CASE("cycle residual vanishes for exact inverse shifts") {
  CameraRig rig = narrow_rig();
  Frame left = random_frame(128, 72, 41);
  DepthMap depth = constant_depth(128, 72, 6.3);  // d = 10

  WarpFn lr = [&](const Frame& f, const Mask& valid) {
    return forward_warp(f, depth, rig, WarpDirection::LeftToRight, &valid);
  };
  WarpFn rl = [&](const Frame& f, const Mask& valid) {
    return forward_warp(f, depth, rig, WarpDirection::RightToLeft, &valid);
  };
  CHECK(cycle_residual(left, lr, rl) == 0.0);

  WarpFn id = [&](const Frame& f, const Mask&) {
    WarpResult w;
    w.image = f;
    w.holes = Mask(f.width, f.height, false);
    w.zbuf = constant_depth(f.width, f.height, 1.0);
    return w;
  };
  CHECK(cycle_residual(left, id, id) == 0.0);

  WarpFn all_holes = [&](const Frame& f, const Mask&) {
    WarpResult w;
    w.image = Frame(f.width, f.height);
    w.holes = Mask(f.width, f.height, true);
    w.zbuf = DepthMap(f.width, f.height);
    return w;
  };
  try {
    cycle_residual(left, all_holes, all_holes);
    FAIL("expected EmptyOverlap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyOverlap);
  }
}

TEST_CASE("cycle residual is clean away from disocclusions") {
  CameraRig rig = narrow_rig();
  // Two integer-disparity layers (d = 20 and 10).
  Scene scene = two_layer_scene(3.15, 6.3, -0.25, -0.05, 0.5);
  RenderOutput oracle = render_stereo(scene, rig);
  ViewRender right = render_view(scene, rig, Eye::Right);

  WarpFn lr = [&](const Frame& f, const Mask& valid) {
    return forward_warp(f, oracle.layers_left.surface, rig, WarpDirection::LeftToRight, &valid);
  };
  WarpFn rl = [&](const Frame& f, const Mask& valid) {
    return forward_warp(f, right.layers.surface, rig, WarpDirection::RightToLeft, &valid);
  };
  CHECK(cycle_residual(oracle.left, lr, rl) < 1e-6);
}
