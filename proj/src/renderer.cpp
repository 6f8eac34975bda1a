#include "sccn/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sccn/errors.hpp"

namespace sccn {

namespace {

constexpr double kNearPlane = 1e-6;

struct ClipVertex {
  Vec3 cam;    // camera frame
  Vec3 model;  // model frame attribute
};

// Sutherland-Hodgman against z >= near. Attributes are affine in camera
// space, so linear interpolation along edges is exact.
int clip_near(const ClipVertex (&in)[3], ClipVertex (&out)[4]) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const ClipVertex& a = in[i];
    const ClipVertex& b = in[(i + 1) % 3];
    const bool a_in = a.cam.z() >= kNearPlane;
    const bool b_in = b.cam.z() >= kNearPlane;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double s = (kNearPlane - a.cam.z()) / (b.cam.z() - a.cam.z());
      out[n++] = {a.cam + s * (b.cam - a.cam), a.model + s * (b.model - a.model)};
    }
  }
  return n;
}

bool is_top_left(const Vec2& a, const Vec2& b, bool ccw) {
  // Edge a->b in a triangle of given screen orientation (y down).
  const Vec2 e = ccw ? Vec2(b - a) : Vec2(a - b);
  const bool top = e.y() == 0.0 && e.x() < 0.0;
  const bool left = e.y() > 0.0;
  return top || left;
}

class Rasterizer {
 public:
  Rasterizer(const CameraIntrinsics& intr, const ColorCodeSpec& spec, RenderOutput& out)
      : intr_(intr), spec_(spec), out_(out) {}

  void draw(const ClipVertex& v0, const ClipVertex& v1, const ClipVertex& v2) {
    const ClipVertex* v[3] = {&v0, &v1, &v2};
    Vec2 s[3];
    double inv_z[3];
    for (int i = 0; i < 3; ++i) {
      inv_z[i] = 1.0 / v[i]->cam.z();
      s[i] = {intr_.fx * v[i]->cam.x() * inv_z[i] + intr_.cx,
              intr_.fy * v[i]->cam.y() * inv_z[i] + intr_.cy};
    }
    const double area = edge(s[0], s[1], s[2]);
    if (area == 0.0 || !std::isfinite(area)) return;
    const bool ccw = area > 0.0;

    const double min_x = std::min({s[0].x(), s[1].x(), s[2].x()});
    const double max_x = std::max({s[0].x(), s[1].x(), s[2].x()});
    const double min_y = std::min({s[0].y(), s[1].y(), s[2].y()});
    const double max_y = std::max({s[0].y(), s[1].y(), s[2].y()});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
    const int x1 = std::min(out_.width() - 1, static_cast<int>(std::ceil(max_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    const int y1 = std::min(out_.height() - 1, static_cast<int>(std::ceil(max_y - 0.5)));
    if (x0 > x1 || y0 > y1) return;

    const bool tl[3] = {is_top_left(s[1], s[2], ccw), is_top_left(s[2], s[0], ccw),
                        is_top_left(s[0], s[1], ccw)};

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 p(x + 0.5, y + 0.5);
        double w[3] = {edge(s[1], s[2], p), edge(s[2], s[0], p), edge(s[0], s[1], p)};
        bool inside = true;
        for (int k = 0; k < 3; ++k) {
          const double wk = ccw ? w[k] : -w[k];
          if (wk < 0.0 || (wk == 0.0 && !tl[k])) {
            inside = false;
            break;
          }
        }
        if (!inside) continue;

        // Screen-space barycentrics, then perspective correction via 1/z.
        double b[3];
        for (int k = 0; k < 3; ++k) b[k] = w[k] / area;
        const double iz = b[0] * inv_z[0] + b[1] * inv_z[1] + b[2] * inv_z[2];
        if (!(iz > 0.0)) continue;
        const double z = 1.0 / iz;
        if (!(z < out_.depth(x, y))) continue;

        Vec3 model = Vec3::Zero();
        for (int k = 0; k < 3; ++k) model += (b[k] * inv_z[k] * z) * v[k]->model;
        model = model.cwiseMax(spec_.aabb.min).cwiseMin(spec_.aabb.max);

        out_.depth(x, y) = z;
        out_.object_mask(x, y) = 1;
        const Vec3 rgb = encode_point(model, spec_);
        const SymmetryTriplet sym = symmetry_value(model, spec_);
        for (int c = 0; c < 3; ++c) {
          out_.colorcode(x, y, c) = rgb[c];
          out_.symmetry_mask(x, y, c) = sym[c];
        }
      }
    }
  }

 private:
  static double edge(const Vec2& a, const Vec2& b, const Vec2& p) {
    return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
  }

  const CameraIntrinsics& intr_;
  const ColorCodeSpec& spec_;
  RenderOutput& out_;
};

RenderOutput blank(int w, int h) {
  RenderOutput out;
  out.colorcode = ImageF(w, h, 3, 0.0);
  out.object_mask = ImageU8(w, h, 1, 0);
  out.symmetry_mask = ImageI8(w, h, 3, 0);
  out.depth = ImageF(w, h, 1, std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace

std::size_t RenderOutput::foreground_count() const {
  return static_cast<std::size_t>(
      std::count_if(object_mask.data().begin(), object_mask.data().end(),
                    [](std::uint8_t v) { return v != 0; }));
}

RenderOutput render(const TriangleMesh& mesh, const Placement& placement,
                    const CameraIntrinsics& intr, const ColorCodeSpec& spec) {
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw Error(ErrorCode::EmptyMesh, "cannot render an empty mesh");
  }
  intr.validate();
  spec.validate();

  RenderOutput out = blank(intr.image_width, intr.image_height);
  std::vector<Vec3> cam(mesh.vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = placement.apply(mesh.vertices[i]);

  Rasterizer raster(intr, spec, out);
  for (const auto& f : mesh.faces) {
    const ClipVertex tri[3] = {{cam[f[0]], mesh.vertices[f[0]]},
                               {cam[f[1]], mesh.vertices[f[1]]},
                               {cam[f[2]], mesh.vertices[f[2]]}};
    if (tri[0].cam.z() < kNearPlane && tri[1].cam.z() < kNearPlane && tri[2].cam.z() < kNearPlane) {
      continue;
    }
    ClipVertex poly[4];
    const int n = clip_near(tri, poly);
    for (int k = 1; k + 1 < n; ++k) raster.draw(poly[0], poly[k], poly[k + 1]);
  }

  if (out.foreground_count() == 0) {
    throw Error(ErrorCode::NothingVisible, "no pixel covered by the object");
  }
  return out;
}

RenderOutput merge_by_depth(const RenderOutput& a, const RenderOutput& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::ShapeMismatch, "renders differ in size");
  }
  RenderOutput out = a;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!(b.depth(x, y) < a.depth(x, y))) continue;
      out.depth(x, y) = b.depth(x, y);
      out.object_mask(x, y) = b.object_mask(x, y);
      for (int c = 0; c < 3; ++c) {
        out.colorcode(x, y, c) = b.colorcode(x, y, c);
        out.symmetry_mask(x, y, c) = b.symmetry_mask(x, y, c);
      }
    }
  }
  return out;
}

}  // namespace sccn
