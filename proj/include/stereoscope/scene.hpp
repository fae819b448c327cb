#pragma once

#include <variant>
#include <vector>

#include "stereoscope/geometry.hpp"
#include "stereoscope/image.hpp"

namespace stereoscope {

struct Sphere {
  Point3 center;
  double radius = 0.0;
};

struct PlaneShape {
  Point3 point;
  Vec3 normal;
};

// Parallelogram patch: corner + u*edge_u + v*edge_v, u,v in [0,1].
struct Quad {
  Point3 corner;
  Vec3 edge_u;
  Vec3 edge_v;
};

struct SolidColor {
  Rgb rgb;
};

// 3D checker evaluated at the hit point. Cells are anchored at a small
// offset so axis-aligned planes at round coordinates do not sit on cell
// boundaries.
struct CheckerTexture {
  Rgb rgb_a;
  Rgb rgb_b;
  double cell_m = 1.0;
};

struct MirrorFinish {
  double reflectivity = 1.0;  // in (0, 1]
};

using Shape = std::variant<Sphere, PlaneShape, Quad>;
using Material = std::variant<SolidColor, CheckerTexture, MirrorFinish>;

struct Primitive {
  int id = 0;
  Shape shape;
  Material material;
};

struct Scene {
  std::vector<Primitive> primitives;
  Rgb background{0.05f, 0.05f, 0.08f};

  // Throws InvalidArgument for degenerate shapes, out-of-range materials
  // or duplicate ids.
  void validate() const;
};

}  // namespace stereoscope
