#include <doctest.h>

#include <cmath>
#include <random>

#include "stereoscope/geometry.hpp"
#include "stereoscope/serialize.hpp"

using namespace stereoscope;

namespace {

CameraRig test_parallel_rig(double cx = 0.0, double cy = 0.0) {
  return CameraRig::parallel(0.063, 1000.0, 128, 72, cx, cy);
}

}  // namespace

TEST_CASE("parallel projection matches the similar-triangle formulas") {
  CameraRig rig = test_parallel_rig();
  StereoProjection p = project_parallel({0.063, 0, 6.3}, rig);
  CHECK(p.left.x == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(p.right.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.disparity_px == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(p.left.y == p.right.y);
}

TEST_CASE("disparity vanishes at infinity") {
  CameraRig rig = test_parallel_rig();
  StereoProjection p = project_parallel({0, 0, 1e6}, rig);
  CHECK(std::abs(p.disparity_px) < 1e-3);
}

TEST_CASE("parallel disparity depends only on depth") {
  CameraRig rig = test_parallel_rig(64.0, 36.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-5.0, 5.0), depth(0.5, 50.0);
  for (int i = 0; i < 500; ++i) {
    double z = depth(rng);
    StereoProjection a = project_parallel({coord(rng), coord(rng), z}, rig);
    StereoProjection b = project_parallel({coord(rng), coord(rng), z}, rig);
    double expected = disparity_from_depth(z, rig);
    // d is independent of X and Y up to floating-point association.
    CHECK(a.disparity_px == doctest::Approx(expected).epsilon(1e-10));
    CHECK(b.disparity_px == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("stereo projection stores disparity as left.x - right.x") {
  CameraRig par = test_parallel_rig(12.5, -3.0);
  CameraRig conv = CameraRig::converged(0.1, 800, 640, 480, 320, 240, 4.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-2.0, 2.0), depth(0.5, 20.0);
  for (int i = 0; i < 200; ++i) {
    Point3 p{coord(rng), coord(rng), depth(rng)};
    StereoProjection a = project_parallel(p, par);
    CHECK(a.disparity_px == a.left.x - a.right.x);
    StereoProjection b = project_converged(p, conv);
    CHECK(b.disparity_px == b.left.x - b.right.x);
  }
}

TEST_CASE("disparity_from_depth closed form") {
  CameraRig rig = test_parallel_rig();
  CHECK(disparity_from_depth(6.3, rig) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(disparity_from_depth(2.0, rig) == doctest::Approx(31.5).epsilon(1e-14));
  CHECK(disparity_from_depth(1000.0 * 0.063, rig) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(disparity_from_depth(0.0, rig), Error);
  CHECK_THROWS_AS(disparity_from_depth(-1.0, rig), Error);
}

TEST_CASE("depth_from_disparity inverts and rejects the singularity") {
  CameraRig rig = test_parallel_rig();
  CHECK(depth_from_disparity(10.0, rig) == doctest::Approx(6.3).epsilon(1e-14));
  CHECK_THROWS_AS(depth_from_disparity(0.0, rig), Error);
  try {
    depth_from_disparity(-2.0, rig);
    FAIL("expected NonPositiveDisparity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveDisparity);
  }
}

TEST_CASE("depth-disparity round trip is exact to 1e-12 relative") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> logz(std::log(1e-3), std::log(1e6));
  std::uniform_real_distribution<double> focal(50.0, 2000.0), base(0.01, 1.0);
  for (int i = 0; i < 2000; ++i) {
    CameraRig rig = CameraRig::parallel(base(rng), focal(rng), 128, 72, 64, 36);
    double z = std::exp(logz(rng));
    double back = depth_from_disparity(disparity_from_depth(z, rig), rig);
    CHECK(std::abs(back - z) <= 1e-12 * z);
  }
}

TEST_CASE("converged projection matches the toed-in rotation formulas") {
  // Direct evaluation of the appendix projections:
  //   x_l = f[(X+B/2)cos t - Z sin t] / [(X+B/2)sin t + Z cos t]
  //   x_r = f[(X-B/2)cos t + Z sin t] / [-(X-B/2)sin t + Z cos t]
  double B = 0.12, f = 900, zc = 3.5;
  CameraRig rig = CameraRig::converged(B, f, 640, 480, 0, 0, zc);
  double theta = std::atan((B / 2) / zc);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(-1.5, 1.5), depth(1.0, 12.0);
  for (int i = 0; i < 300; ++i) {
    double X = coord(rng), Y = coord(rng), Z = depth(rng);
    double xl = f * ((X + B / 2) * std::cos(theta) - Z * std::sin(theta)) /
                ((X + B / 2) * std::sin(theta) + Z * std::cos(theta));
    double xr = f * ((X - B / 2) * std::cos(theta) + Z * std::sin(theta)) /
                (-(X - B / 2) * std::sin(theta) + Z * std::cos(theta));
    StereoProjection p = project_converged({X, Y, Z}, rig);
    CHECK(p.left.x == doctest::Approx(xl).epsilon(1e-12));
    CHECK(p.right.x == doctest::Approx(xr).epsilon(1e-12));
  }
}

TEST_CASE("convergence point projects with zero disparity") {
  CameraRig rig = CameraRig::converged(0.063, 1000, 128, 72, 64, 36, 3.0);
  StereoProjection p = project_converged({0, 0, 3.0}, rig);
  CHECK(std::abs(p.disparity_px) < 1e-9);
}

TEST_CASE("axial disparity sign follows sign(Zc - Z)") {
  CameraRig rig = CameraRig::converged(0.1, 500, 640, 480, 320, 240, 4.0);
  for (double z : {0.5, 1.0, 2.0, 3.9}) {
    CHECK(project_converged({0, 0, z}, rig).disparity_px > 0);
  }
  for (double z : {4.1, 6.0, 20.0, 500.0}) {
    CHECK(project_converged({0, 0, z}, rig).disparity_px < 0);
  }
}

TEST_CASE("keystone makes vertical coordinates differ between views") {
  CameraRig rig = CameraRig::converged(0.2, 400, 640, 480, 320, 240, 2.0);
  StereoProjection p = project_converged({0.8, 0.6, 3.0}, rig);
  CHECK(std::abs(p.left.y - p.right.y) > 0.1);
}

TEST_CASE("converged approaches the midpoint-origin parallel limit") {
  double B = 0.063, f = 1000;
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> coord(-2.0, 2.0), depth(2.0, 8.0);
  std::vector<Point3> cloud;
  for (int i = 0; i < 50; ++i) cloud.push_back({coord(rng), coord(rng), depth(rng)});

  double prev = 1e18;
  double final_err = 0;
  for (double zc = 1e3; zc <= 1.1e8; zc *= 10) {
    CameraRig rig = CameraRig::converged(B, f, 128, 72, 64, 36, zc);
    double worst = 0;
    for (const Point3& p : cloud) {
      StereoProjection c = project_converged(p, rig);
      // Parallel projection re-expressed with the origin at the baseline
      // midpoint: cameras at -/+ B/2 looking along +z.
      double xl = f * (p.x + B / 2) / p.z + rig.cx;
      double xr = f * (p.x - B / 2) / p.z + rig.cx;
      double yy = f * p.y / p.z + rig.cy;
      worst = std::max(worst, std::abs(c.left.x - xl));
      worst = std::max(worst, std::abs(c.right.x - xr));
      worst = std::max(worst, std::abs(c.left.y - yy));
      worst = std::max(worst, std::abs(c.right.y - yy));
    }
    CHECK(worst < prev);
    prev = worst;
    final_err = worst;
  }
  CHECK(final_err < 1e-6);
}

TEST_CASE("mirroring the world about the midsagittal plane swaps the eyes") {
  CameraRig rig = CameraRig::converged(0.09, 700, 640, 480, 320, 200, 2.5);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(-1.0, 1.0), depth(1.0, 9.0);
  for (int i = 0; i < 200; ++i) {
    Point3 p{coord(rng), coord(rng), depth(rng)};
    StereoProjection a = project_converged(p, rig);
    StereoProjection b = project_converged({-p.x, p.y, p.z}, rig);
    CHECK(b.left.x - rig.cx == doctest::Approx(-(a.right.x - rig.cx)).epsilon(1e-11));
    CHECK(b.right.x - rig.cx == doctest::Approx(-(a.left.x - rig.cx)).epsilon(1e-11));
    CHECK(b.left.y == doctest::Approx(a.right.y).epsilon(1e-11));
  }
}

TEST_CASE("zero_disparity_depth returns Zc and rejects parallel rigs") {
  CameraRig conv = CameraRig::converged(0.063, 1000, 128, 72, 64, 36, 3.0);
  CHECK(zero_disparity_depth(conv) == 3.0);
  try {
    zero_disparity_depth(test_parallel_rig());
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotConverged);
  }
}

TEST_CASE("bisection on the axial disparity recovers Zc") {
  // Independent root find on the sign change of project_converged along z.
  CameraRig rig = CameraRig::converged(0.08, 600, 640, 480, 320, 240, 2.75);
  auto axial = [&](double z) { return project_converged({0, 0, z}, rig).disparity_px; };
  double lo = 0.275, hi = 27.5;
  REQUIRE(axial(lo) > 0);
  REQUIRE(axial(hi) < 0);
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (axial(mid) > 0 ? lo : hi) = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(2.75).epsilon(1e-6));
}

TEST_CASE("projection preconditions raise typed errors") {
  CameraRig par = test_parallel_rig();
  CameraRig conv = CameraRig::converged(0.063, 1000, 128, 72, 64, 36, 3.0);
  CHECK_THROWS_AS(project_parallel({0, 0, 0}, par), Error);
  CHECK_THROWS_AS(project_parallel({0, 0, -2}, par), Error);
  CHECK_THROWS_AS(project_parallel({0, 0, 1}, conv), Error);
  CHECK_THROWS_AS(project_converged({0, 0, 1}, par), Error);
  try {
    project_converged({0, 0, -5}, conv);
    FAIL("expected BehindCamera");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BehindCamera);
  }
}

TEST_CASE("rig invariants are validated") {
  CHECK_THROWS_AS(CameraRig::parallel(0, 1000, 128, 72, 64, 36), Error);
  CHECK_THROWS_AS(CameraRig::parallel(0.063, -5, 128, 72, 64, 36), Error);
  CHECK_THROWS_AS(CameraRig::parallel(0.063, 1000, 0, 72, 64, 36), Error);
  CHECK_THROWS_AS(CameraRig::converged(0.063, 1000, 128, 72, 64, 36, 0.0), Error);
}

TEST_CASE("rig JSON round trip") {
  CameraRig conv = CameraRig::converged(0.063, 1000, 128, 72, 64, 36, 3.25);
  CameraRig back = rig_from_json(rig_to_json(conv));
  CHECK(back.is_converged());
  CHECK(back.convergence_m() == 3.25);
  CHECK(back.baseline_m == conv.baseline_m);
  CHECK(back.focal_px == conv.focal_px);
  CHECK(back.width_px == conv.width_px);

  CameraRig par = CameraRig::default_parallel();
  CameraRig back2 = rig_from_json(rig_to_json(par));
  CHECK(!back2.is_converged());
  CHECK(back2.baseline_m == 0.063);
  CHECK(back2.focal_px == 64.0);

  CHECK_THROWS_AS(rig_from_json("{\"format\": \"diagonal\"}"), Error);
  CHECK_THROWS_AS(rig_from_json("not json"), Error);
}
