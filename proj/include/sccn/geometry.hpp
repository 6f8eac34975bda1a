#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "sccn/errors.hpp"
#include "sccn/random.hpp"

namespace sccn {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid model-to-camera transform. The rotation is validated on construction
/// (orthonormal, det +1, within 1e-9).
class Pose {
 public:
  Pose() = default;
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return {}; }

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  Pose inverse() const;
  /// (*this) * other: applies `other` first.
  Pose compose(const Pose& other) const;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

/// Model-to-camera map x -> L x + t with an orthogonal linear part of either
/// handedness. Proper poses convert implicitly; improper placements arise when
/// a pose is composed with a mirror reflection of the model frame.
struct Placement {
  Mat3 linear = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Placement() = default;
  Placement(const Mat3& l, const Vec3& t) : linear(l), translation(t) {}
  Placement(const Pose& pose)  // NOLINT(google-explicit-constructor)
      : linear(pose.rotation()), translation(pose.translation()) {}

  Vec3 apply(const Vec3& p) const { return linear * p + translation; }
};

/// Plane of reflective symmetry orthogonal to one model axis.
struct ReflectionPlane {
  int axis = 0;
  double offset = 0.0;

  /// I - 2 n n^T for the unit axis normal n.
  Mat3 matrix() const;
  Vec3 mirror(const Vec3& p) const;
};

/// The placement that maps x to `placement.apply(plane.mirror(x))`.
Placement reflect_placement(const Placement& placement, const ReflectionPlane& plane);

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int image_width = 0;
  int image_height = 0;

  /// Throws InvalidArgument unless focal lengths are positive and the
  /// principal point lies inside the image.
  void validate() const;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  Aabb aabb;
  double diameter = 0.0;
};

Vec3 transform_point(const Pose& pose, const Vec3& p);

/// Pinhole projection in continuous pixel coordinates; pixel (u, v) covers
/// [u, u+1) x [v, v+1). Throws PointBehindCamera for z <= 0.
Vec2 project_point(const CameraIntrinsics& intr, const Vec3& p_cam);

/// Validates indices and fills aabb plus the exact max pairwise vertex
/// distance. Throws EmptyMesh when there are no vertices or no faces.
TriangleMesh mesh_stats(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

/// Reads `v x y z` and `f i j k` lines (1-based, triangles; `i/j/k` style
/// index suffixes are stripped). Everything else is ignored.
TriangleMesh load_obj(const std::filesystem::path& path);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Axis-aligned box centred at the origin.
TriangleMesh make_box_mesh(const Vec3& size);

/// Box body with a gabled roof along +y. Mirror-symmetric about x = 0 only
/// when `skew` is zero; a non-zero skew shifts the ridge along x.
TriangleMesh make_house_mesh(double skew = 0.0);

/// Rotation by `angle` radians about unit `axis`.
Mat3 axis_angle(const Vec3& axis, double angle);

/// Uniformly distributed rotation over SO(3).
Mat3 random_rotation(Rng& rng);

/// Geodesic angle between two rotations, radians.
double rotation_angle_between(const Mat3& a, const Mat3& b);

/// Projects a near-orthonormal matrix onto SO(3).
Mat3 orthonormalize(const Mat3& m);

}  // namespace sccn
