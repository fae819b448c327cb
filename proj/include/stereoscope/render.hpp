#pragma once

#include "stereoscope/geometry.hpp"
#include "stereoscope/image.hpp"
#include "stereoscope/scene.hpp"

namespace stereoscope {

// Two depths per pixel: the first-hit surface depth d_S, and where the first
// hit is a mirror, the virtual-image depth d_R (total unfolded ray path
// projected onto the viewing axis). Depths are camera-frame z, in meters.
struct DepthLayers {
  DepthMap surface;
  DepthMap virtual_depth;
  Mask mirror_mask;
};

struct ViewRender {
  Frame frame;
  DepthLayers layers;
};

struct RenderOutput {
  Frame left;
  Frame right;
  DepthLayers layers_left;
  // True correspondence disparity of the left view: from projecting the hit
  // point (or the virtual image point for mirror pixels) into the right view.
  // Invalid where there is no hit, where a mirror reflects only background,
  // or where the right view's sightline to the point is blocked.
  DisparityMap gt_disparity_left;
};

// One primary ray per pixel center; nearest hit shades by material; mirrors
// reflect exactly once. Degenerate scenes render the background.
ViewRender render_view(const Scene& scene, const CameraRig& rig, Eye eye, int workers = 0);

// Renders both eyes plus the left view's ground-truth correspondence map.
RenderOutput render_stereo(const Scene& scene, const CameraRig& rig, int workers = 0);

// Canonical depth-ambiguity scene: a checkered wall just behind a centered
// mirror (frame region Q, depth ~= mirror surface depth), and a checkered
// backdrop behind the cameras whose reflection fills the mirror with a
// virtual image far deeper than the wall.
Scene make_mirror_demo_scene(const CameraRig& rig);

// Closed-form depths of make_mirror_demo_scene, valid for any rig.
inline constexpr double kMirrorDemoSurfaceDepthM = 2.0;   // d_S
inline constexpr double kMirrorDemoVirtualDepthM = 10.0;  // d_R
inline constexpr double kMirrorDemoWallDepthM = 2.05;     // frame region depth

}  // namespace stereoscope
