#pragma once

#include "sccn/colorcode.hpp"
#include "sccn/geometry.hpp"
#include "sccn/image.hpp"

namespace sccn {

/// Ground-truth layers of one rendered object.
struct RenderOutput {
  ImageF colorcode;      // W x H x 3, background 0
  ImageU8 object_mask;   // W x H, 1 on the object
  ImageI8 symmetry_mask; // W x H x 3, labels in {-1, 0, +1}
  ImageF depth;          // W x H, +inf on background

  int width() const noexcept { return depth.width(); }
  int height() const noexcept { return depth.height(); }
  std::size_t foreground_count() const;
};

/// Z-buffered rasterization with perspective-correct interpolation of
/// model-frame positions. Pixels are sampled at their centres (u+0.5, v+0.5)
/// and shared edges follow the top-left rule. Triangles are clipped against a
/// near plane at z = 1e-6 m; there is no backface culling.
///
/// Accepts improper placements, which is how a mirror-reflected pose of a
/// symmetric object is rendered. Throws NothingVisible when no pixel is
/// covered.
RenderOutput render(const TriangleMesh& mesh, const Placement& placement,
                    const CameraIntrinsics& intr, const ColorCodeSpec& spec);

/// Per-pixel nearest-depth merge of two renders of equal size.
RenderOutput merge_by_depth(const RenderOutput& a, const RenderOutput& b);

}  // namespace sccn
