#include "stereoscope/render.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "stereoscope/parallel.hpp"

namespace stereoscope {

namespace {

constexpr double kTMin = 1e-9;  // self-intersection guard, meters
// Checker cells are anchored off the coordinate grid so that axis-aligned
// planes at round coordinates never lie on a cell boundary.
constexpr double kCheckerAnchor = 0.0131;

struct Ray {
  Point3 origin;
  Vec3 dir;  // unit length
};

struct Hit {
  double t = 0.0;
  Point3 point;
  Vec3 normal;  // unit, orientation unspecified
  const Primitive* prim = nullptr;
};

std::optional<double> intersect_sphere(const Ray& ray, const Sphere& s) {
  Vec3 oc = s.center - ray.origin;
  double b = oc.dot(ray.dir);
  double disc = b * b - (oc.dot(oc) - s.radius * s.radius);
  if (disc < 0) return std::nullopt;
  double root = std::sqrt(disc);
  double t = b - root;
  if (t <= kTMin) t = b + root;
  if (t <= kTMin) return std::nullopt;
  return t;
}

std::optional<double> intersect_plane(const Ray& ray, const Point3& p0, const Vec3& n) {
  double denom = ray.dir.dot(n);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  double t = (p0 - ray.origin).dot(n) / denom;
  if (t <= kTMin) return std::nullopt;
  return t;
}

std::optional<double> intersect_quad(const Ray& ray, const Quad& q) {
  Vec3 n = q.edge_u.cross(q.edge_v);
  auto t = intersect_plane(ray, q.corner, n);
  if (!t) return std::nullopt;
  Vec3 rel = (ray.origin + ray.dir * *t) - q.corner;
  double nn = n.dot(n);
  double u = rel.cross(q.edge_v).dot(n) / nn;
  double v = q.edge_u.cross(rel).dot(n) / nn;
  if (u < 0 || u > 1 || v < 0 || v > 1) return std::nullopt;
  return t;
}

Vec3 shape_normal(const Shape& shape, const Point3& at) {
  if (const auto* s = std::get_if<Sphere>(&shape)) return (at - s->center).normalized();
  if (const auto* p = std::get_if<PlaneShape>(&shape)) return p->normal.normalized();
  const auto& q = std::get<Quad>(shape);
  return q.edge_u.cross(q.edge_v).normalized();
}

std::optional<Hit> nearest_hit(const Scene& scene, const Ray& ray) {
  std::optional<Hit> best;
  for (const Primitive& prim : scene.primitives) {
    std::optional<double> t;
    if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
      t = intersect_sphere(ray, *s);
    } else if (const auto* p = std::get_if<PlaneShape>(&prim.shape)) {
      t = intersect_plane(ray, p->point, p->normal);
    } else {
      t = intersect_quad(ray, std::get<Quad>(prim.shape));
    }
    if (t && (!best || *t < best->t)) {
      Hit h;
      h.t = *t;
      h.point = ray.origin + ray.dir * *t;
      h.normal = shape_normal(prim.shape, h.point);
      h.prim = &prim;
      best = h;
    }
  }
  return best;
}

Rgb shade_flat(const Material& material, const Point3& at) {
  if (const auto* s = std::get_if<SolidColor>(&material)) return s->rgb;
  const auto& c = std::get<CheckerTexture>(material);
  auto cell = [&](double v) {
    return static_cast<long long>(std::floor((v - kCheckerAnchor) / c.cell_m));
  };
  long long parity = cell(at.x) + cell(at.y) + cell(at.z);
  return (parity & 1LL) == 0 ? c.rgb_a : c.rgb_b;
}

bool is_mirror(const Primitive& prim) {
  return std::holds_alternative<MirrorFinish>(prim.material);
}

struct PixelTrace {
  Rgb color;
  bool hit = false;
  bool mirror = false;
  double surface_t = 0.0;
  double total_t = 0.0;                  // surface_t + reflected segment
  std::optional<Point3> effective;       // hit point, or virtual image point
};

// One primary ray, at most one mirror bounce. The effective point is the
// world point the pixel "sees": the hit itself, or for mirror pixels the
// virtual image (the primary ray extended through the mirror by the
// reflected path length). A reflection that escapes to the background or
// lands on a second mirror has no effective point.
PixelTrace trace_pixel(const Scene& scene, const Ray& ray) {
  PixelTrace out;
  auto h1 = nearest_hit(scene, ray);
  if (!h1) {
    out.color = scene.background;
    return out;
  }
  out.hit = true;
  out.surface_t = h1->t;
  if (!is_mirror(*h1->prim)) {
    out.color = shade_flat(h1->prim->material, h1->point);
    out.effective = h1->point;
    return out;
  }
  out.mirror = true;
  double refl = std::get<MirrorFinish>(h1->prim->material).reflectivity;
  Vec3 r = ray.dir - h1->normal * (2.0 * ray.dir.dot(h1->normal));
  auto h2 = nearest_hit(scene, Ray{h1->point, r});
  if (!h2 || is_mirror(*h2->prim)) {
    out.color = {static_cast<float>(refl * scene.background.r),
                 static_cast<float>(refl * scene.background.g),
                 static_cast<float>(refl * scene.background.b)};
    return out;
  }
  Rgb c = shade_flat(h2->prim->material, h2->point);
  out.color = {static_cast<float>(refl * c.r), static_cast<float>(refl * c.g),
               static_cast<float>(refl * c.b)};
  out.total_t = h1->t + h2->t;
  out.effective = ray.origin + ray.dir * out.total_t;
  return out;
}

struct ViewData {
  Frame frame;
  DepthLayers layers;
  std::vector<std::optional<Point3>> effective;
};

Ray pixel_ray(const EyePose& pose, const Mat3& cam_to_world, const CameraRig& rig, double px,
              double py) {
  Vec3 d_cam{(px - rig.cx) / rig.focal_px, (py - rig.cy) / rig.focal_px, 1.0};
  return {pose.center, (cam_to_world * d_cam).normalized()};
}

double camera_depth(const EyePose& pose, const Point3& p) {
  return (pose.world_to_cam * (p - pose.center)).z;
}

ViewData render_one(const Scene& scene, const CameraRig& rig, Eye eye, int workers) {
  rig.validate();
  scene.validate();
  const int w = rig.width_px, h = rig.height_px;
  ViewData view;
  view.frame = Frame(w, h);
  view.layers.surface = DepthMap(w, h);
  view.layers.virtual_depth = DepthMap(w, h);
  view.layers.mirror_mask = Mask(w, h);
  view.effective.assign(static_cast<size_t>(w) * h, std::nullopt);

  EyePose pose = eye_pose(rig, eye);
  Mat3 cam_to_world = pose.world_to_cam.transposed();

  parallel_for(h, workers, [&](int y) {
    for (int x = 0; x < w; ++x) {
      Ray ray = pixel_ray(pose, cam_to_world, rig, x + 0.5, y + 0.5);
      PixelTrace px = trace_pixel(scene, ray);
      view.frame.set(x, y, px.color);
      if (!px.hit) continue;
      Point3 surf = ray.origin + ray.dir * px.surface_t;
      view.layers.surface.set(x, y, camera_depth(pose, surf));
      if (px.mirror) {
        view.layers.mirror_mask.set(x, y, true);
        if (px.effective)
          view.layers.virtual_depth.set(x, y, camera_depth(pose, *px.effective));
      }
      view.effective[static_cast<size_t>(y) * w + x] = px.effective;
    }
  });
  return view;
}

}  // namespace

ViewRender render_view(const Scene& scene, const CameraRig& rig, Eye eye, int workers) {
  ViewData v = render_one(scene, rig, eye, workers);
  return {std::move(v.frame), std::move(v.layers)};
}

RenderOutput render_stereo(const Scene& scene, const CameraRig& rig, int workers) {
  ViewData left = render_one(scene, rig, Eye::Left, workers);
  ViewData right = render_one(scene, rig, Eye::Right, workers);

  const int w = rig.width_px, h = rig.height_px;
  DisparityMap gt(w, h);
  EyePose right_pose = eye_pose(rig, Eye::Right);
  Mat3 right_cam_to_world = right_pose.world_to_cam.transposed();

  parallel_for(h, workers, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const auto& eff = left.effective[static_cast<size_t>(y) * w + x];
      if (!eff) continue;
      StereoProjection proj;
      try {
        proj = project_point(*eff, rig);
      } catch (const Error&) {
        continue;  // behind a camera: no correspondence
      }
      // The correspondence is real only if the right camera's sightline to
      // the point reaches it (same effective point, unoccluded).
      Ray probe = pixel_ray(right_pose, right_cam_to_world, rig, proj.right.x, proj.right.y);
      PixelTrace seen = trace_pixel(scene, probe);
      if (!seen.effective) continue;
      double tol = 1e-6 * std::max(1.0, eff->norm());
      if ((*seen.effective - *eff).norm() > tol) continue;
      gt.set(x, y, proj.disparity_px);
    }
  });

  RenderOutput out;
  out.left = std::move(left.frame);
  out.right = std::move(right.frame);
  out.layers_left = std::move(left.layers);
  out.gt_disparity_left = std::move(gt);
  return out;
}

Scene make_mirror_demo_scene(const CameraRig& rig) {
  rig.validate();
  // Mirror extents cover the central ~55% of the field of view at the
  // mirror depth, whatever the rig's focal length and aspect.
  double half_x = 0.55 * kMirrorDemoSurfaceDepthM * (rig.width_px / 2.0) / rig.focal_px;
  double half_y = 0.55 * kMirrorDemoSurfaceDepthM * (rig.height_px / 2.0) / rig.focal_px;

  Scene scene;
  scene.background = {0.05f, 0.05f, 0.08f};

  // Frame region Q: checkered wall just behind the mirror surface.
  scene.primitives.push_back(
      {1, PlaneShape{{0, 0, kMirrorDemoWallDepthM}, {0, 0, -1}},
       CheckerTexture{{0.85f, 0.78f, 0.62f}, {0.24f, 0.20f, 0.16f}, 0.25}});

  // Region P: the mirror itself, surface depth d_S.
  scene.primitives.push_back(
      {2,
       Quad{{-half_x, -half_y, kMirrorDemoSurfaceDepthM},
            {2 * half_x, 0, 0},
            {0, 2 * half_y, 0}},
       MirrorFinish{0.85}});

  // Reflected content: a checkered backdrop behind the cameras. Its mirror
  // image lies at depth d_S + (d_S - z_backdrop) = 10 m for every pixel.
  double backdrop_z = 2.0 * kMirrorDemoSurfaceDepthM - kMirrorDemoVirtualDepthM;
  scene.primitives.push_back({3, PlaneShape{{0, 0, backdrop_z}, {0, 0, 1}},
                              CheckerTexture{{0.75f, 0.30f, 0.22f}, {0.92f, 0.88f, 0.80f}, 1.0}});
  return scene;
}

}  // namespace stereoscope
