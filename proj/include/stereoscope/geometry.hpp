#pragma once

#include <cmath>
#include <variant>

#include "stereoscope/error.hpp"

namespace stereoscope {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

using Point3 = Vec3;

struct Mat3 {
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  static Mat3 identity() { return {}; }

  // Rotation about the y axis (x right, y down, z forward).
  static Mat3 rotation_y(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    r.m[0][0] = c;
    r.m[0][1] = 0;
    r.m[0][2] = s;
    r.m[1][0] = 0;
    r.m[1][1] = 1;
    r.m[1][2] = 0;
    r.m[2][0] = -s;
    r.m[2][1] = 0;
    r.m[2][2] = c;
    return r;
  }

  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.m[i][j] = m[j][i];
    return t;
  }
};

struct ParallelFormat {};
struct ConvergedFormat {
  double convergence_m = 0.0;  // Z_c, depth of the zero-disparity plane
};

// Pinhole stereo rig. Coordinate convention throughout: z forward, x right,
// y down, pixel (0,0) at top-left, pixel centers at (i+0.5, j+0.5).
// World frame: parallel rigs put the origin at the left camera; converged
// rigs put it at the baseline midpoint with the cameras translated by
// +/- B/2 and toed in by -/+ theta, theta = atan((B/2)/Z_c).
struct CameraRig {
  double baseline_m = 0.0;
  double focal_px = 0.0;
  int width_px = 0;
  int height_px = 0;
  double cx = 0.0;
  double cy = 0.0;
  std::variant<ParallelFormat, ConvergedFormat> format = ParallelFormat{};

  bool is_converged() const { return std::holds_alternative<ConvergedFormat>(format); }

  double convergence_m() const {
    if (!is_converged()) throw Error(ErrorKind::NotConverged, "rig has no convergence distance");
    return std::get<ConvergedFormat>(format).convergence_m;
  }

  double convergence_angle() const { return std::atan((baseline_m / 2.0) / convergence_m()); }

  void validate() const;

  static CameraRig parallel(double baseline_m, double focal_px, int w, int h, double cx,
                            double cy);
  static CameraRig converged(double baseline_m, double focal_px, int w, int h, double cx,
                             double cy, double convergence_m);
  // 6.3 cm baseline, focal length set for a 90 degree horizontal FOV,
  // principal point at the image center.
  static CameraRig default_parallel(int w = 128, int h = 72);
};

enum class Eye { Left, Right };

// World-to-camera pose of one eye of the rig.
struct EyePose {
  Point3 center;        // camera center, world coordinates
  Mat3 world_to_cam;    // rotation applied to (p - center)
};

EyePose eye_pose(const CameraRig& rig, Eye eye);

struct PixelPoint {
  double x = 0.0, y = 0.0;
};

struct StereoProjection {
  PixelPoint left;
  PixelPoint right;
  double disparity_px = 0.0;  // left.x - right.x by construction
};

// Parallel-rig projection: x_l = f*X/Z + cx, x_r = f*(X-B)/Z + cx,
// y = f*Y/Z + cy for both eyes.
StereoProjection project_parallel(const Point3& p, const CameraRig& rig);

// Converged-rig projection: each eye applies its toed-in world-to-camera
// rotation, then x = f*Xcam/Zcam + cx, y = f*Ycam/Zcam + cy.
StereoProjection project_converged(const Point3& p, const CameraRig& rig);

// Dispatch on rig format.
StereoProjection project_point(const Point3& p, const CameraRig& rig);

// d = f*B/Z. Parallel rigs only.
double disparity_from_depth(double depth_m, const CameraRig& rig);

// Z = f*B/d. Parallel rigs only; d must be strictly positive.
double depth_from_disparity(double disparity_px, const CameraRig& rig);

// Depth of the zero-disparity plane Z_c of a converged rig.
double zero_disparity_depth(const CameraRig& rig);

}  // namespace stereoscope
