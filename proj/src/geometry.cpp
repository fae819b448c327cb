#include "stereoscope/geometry.hpp"

#include <cmath>

namespace stereoscope {

void CameraRig::validate() const {
  if (!(baseline_m > 0)) throw Error(ErrorKind::InvalidArgument, "baseline_m must be > 0");
  if (!(focal_px > 0)) throw Error(ErrorKind::InvalidArgument, "focal_px must be > 0");
  if (width_px < 1 || height_px < 1)
    throw Error(ErrorKind::InvalidArgument, "image dimensions must be >= 1");
  if (!std::isfinite(cx) || !std::isfinite(cy))
    throw Error(ErrorKind::InvalidArgument, "principal point must be finite");
  if (is_converged()) {
    double zc = std::get<ConvergedFormat>(format).convergence_m;
    if (!(zc > 0)) throw Error(ErrorKind::InvalidArgument, "convergence_m must be > 0");
    double theta = std::atan((baseline_m / 2.0) / zc);
    if (!(theta > 0.0 && theta < M_PI / 2.0))
      throw Error(ErrorKind::InvalidArgument, "convergence angle out of (0, pi/2)");
  }
}

CameraRig CameraRig::parallel(double baseline_m, double focal_px, int w, int h, double cx,
                              double cy) {
  CameraRig rig{baseline_m, focal_px, w, h, cx, cy, ParallelFormat{}};
  rig.validate();
  return rig;
}

CameraRig CameraRig::converged(double baseline_m, double focal_px, int w, int h, double cx,
                               double cy, double convergence_m) {
  CameraRig rig{baseline_m, focal_px, w, h, cx, cy, ConvergedFormat{convergence_m}};
  rig.validate();
  return rig;
}

CameraRig CameraRig::default_parallel(int w, int h) {
  // hfov = 2*atan((W/2)/f) = 90 degrees  =>  f = W/2
  return parallel(0.063, w / 2.0, w, h, w / 2.0, h / 2.0);
}

EyePose eye_pose(const CameraRig& rig, Eye eye) {
  if (!rig.is_converged()) {
    // Parallel: origin at the left camera, both axes along +z.
    Point3 center = (eye == Eye::Left) ? Point3{0, 0, 0} : Point3{rig.baseline_m, 0, 0};
    return {center, Mat3::identity()};
  }
  double theta = rig.convergence_angle();
  double half = rig.baseline_m / 2.0;
  if (eye == Eye::Left) {
    return {Point3{-half, 0, 0}, Mat3::rotation_y(-theta)};
  }
  return {Point3{half, 0, 0}, Mat3::rotation_y(theta)};
}

namespace {

PixelPoint project_pinhole(const Vec3& cam, const CameraRig& rig) {
  return {rig.focal_px * cam.x / cam.z + rig.cx, rig.focal_px * cam.y / cam.z + rig.cy};
}

}  // namespace

StereoProjection project_parallel(const Point3& p, const CameraRig& rig) {
  if (rig.is_converged())
    throw Error(ErrorKind::FormatMismatch, "project_parallel requires a parallel rig");
  if (!(p.z > 0)) throw Error(ErrorKind::NonPositiveDepth, "point depth must be > 0");
  StereoProjection s;
  double y = rig.focal_px * p.y / p.z + rig.cy;
  s.left = {rig.focal_px * p.x / p.z + rig.cx, y};
  s.right = {rig.focal_px * (p.x - rig.baseline_m) / p.z + rig.cx, y};
  s.disparity_px = s.left.x - s.right.x;
  return s;
}

StereoProjection project_converged(const Point3& p, const CameraRig& rig) {
  if (!rig.is_converged())
    throw Error(ErrorKind::FormatMismatch, "project_converged requires a converged rig");
  EyePose left = eye_pose(rig, Eye::Left);
  EyePose right = eye_pose(rig, Eye::Right);
  Vec3 cam_l = left.world_to_cam * (p - left.center);
  Vec3 cam_r = right.world_to_cam * (p - right.center);
  if (!(cam_l.z > 0) || !(cam_r.z > 0))
    throw Error(ErrorKind::BehindCamera, "point behind a toed-in camera");
  StereoProjection s;
  s.left = project_pinhole(cam_l, rig);
  s.right = project_pinhole(cam_r, rig);
  s.disparity_px = s.left.x - s.right.x;
  return s;
}

StereoProjection project_point(const Point3& p, const CameraRig& rig) {
  return rig.is_converged() ? project_converged(p, rig) : project_parallel(p, rig);
}

double disparity_from_depth(double depth_m, const CameraRig& rig) {
  if (rig.is_converged())
    throw Error(ErrorKind::FormatMismatch, "disparity_from_depth requires a parallel rig");
  if (!(depth_m > 0)) throw Error(ErrorKind::NonPositiveDepth, "depth must be > 0");
  return rig.focal_px * rig.baseline_m / depth_m;
}

double depth_from_disparity(double disparity_px, const CameraRig& rig) {
  if (rig.is_converged())
    throw Error(ErrorKind::FormatMismatch, "depth_from_disparity requires a parallel rig");
  if (!(disparity_px > 0))
    throw Error(ErrorKind::NonPositiveDisparity,
                "disparity must be > 0; the inverse relation breaks down at or past infinity");
  return rig.focal_px * rig.baseline_m / disparity_px;
}

double zero_disparity_depth(const CameraRig& rig) {
  return rig.convergence_m();  // throws NotConverged for parallel rigs
}

}  // namespace stereoscope
