#include "stereoscope/scene.hpp"

#include <cmath>
#include <set>

namespace stereoscope {

namespace {

bool color_ok(const Rgb& c) {
  return c.r >= 0 && c.r <= 1 && c.g >= 0 && c.g <= 1 && c.b >= 0 && c.b <= 1;
}

void validate_shape(const Shape& shape) {
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    if (!(s->radius > 0)) throw Error(ErrorKind::InvalidArgument, "sphere radius must be > 0");
    if (!s->center.finite()) throw Error(ErrorKind::InvalidArgument, "sphere center not finite");
  } else if (const auto* pl = std::get_if<PlaneShape>(&shape)) {
    if (!(pl->normal.norm() > 0))
      throw Error(ErrorKind::InvalidArgument, "plane normal must be non-zero");
  } else if (const auto* q = std::get_if<Quad>(&shape)) {
    if (!(q->edge_u.cross(q->edge_v).norm() > 0))
      throw Error(ErrorKind::InvalidArgument, "quad edges are degenerate");
  }
}

void validate_material(const Material& material) {
  if (const auto* s = std::get_if<SolidColor>(&material)) {
    if (!color_ok(s->rgb)) throw Error(ErrorKind::InvalidArgument, "solid color out of [0,1]");
  } else if (const auto* c = std::get_if<CheckerTexture>(&material)) {
    if (!color_ok(c->rgb_a) || !color_ok(c->rgb_b))
      throw Error(ErrorKind::InvalidArgument, "checker colors out of [0,1]");
    if (!(c->cell_m > 0)) throw Error(ErrorKind::InvalidArgument, "checker cell must be > 0");
  } else if (const auto* m = std::get_if<MirrorFinish>(&material)) {
    if (!(m->reflectivity > 0 && m->reflectivity <= 1))
      throw Error(ErrorKind::InvalidArgument, "mirror reflectivity must be in (0,1]");
  }
}

}  // namespace

void Scene::validate() const {
  if (!color_ok(background)) throw Error(ErrorKind::InvalidArgument, "background out of [0,1]");
  std::set<int> ids;
  for (const Primitive& prim : primitives) {
    if (!ids.insert(prim.id).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate primitive id");
    validate_shape(prim.shape);
    validate_material(prim.material);
  }
}

}  // namespace stereoscope
