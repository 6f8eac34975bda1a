#include "sccn/geometry.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/SVD>

#include "sccn/errors.hpp"

namespace sccn {

namespace {

constexpr double kRotationTolerance = 1e-9;

bool is_rotation(const Mat3& r) {
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= kRotationTolerance && std::abs(r.determinant() - 1.0) <= kRotationTolerance;
}

int parse_face_index(const std::string& token, std::size_t vertex_count, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  std::size_t consumed = 0;
  long value = 0;
  try {
    value = std::stol(head, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != head.size() || head.empty() || value < 1 ||
      static_cast<std::size_t>(value) > vertex_count) {
    throw Error(ErrorCode::MeshLoadFailure,
                "bad face index '" + token + "' on line " + std::to_string(line_no));
  }
  return static_cast<int>(value - 1);
}

}  // namespace

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite() || !is_rotation(rotation)) {
    throw Error(ErrorCode::InvalidArgument, "pose rotation is not a proper rotation matrix");
  }
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return Pose(rt, -(rt * translation_));
}

Pose Pose::compose(const Pose& other) const {
  return Pose(orthonormalize(rotation_ * other.rotation_),
              rotation_ * other.translation_ + translation_);
}

Mat3 ReflectionPlane::matrix() const {
  if (axis < 0 || axis > 2) throw Error(ErrorCode::InvalidArgument, "reflection axis must be 0, 1 or 2");
  Mat3 m = Mat3::Identity();
  m(axis, axis) = -1.0;
  return m;
}

Vec3 ReflectionPlane::mirror(const Vec3& p) const {
  if (axis < 0 || axis > 2) throw Error(ErrorCode::InvalidArgument, "reflection axis must be 0, 1 or 2");
  Vec3 q = p;
  q[axis] = 2.0 * offset - p[axis];
  return q;
}

Placement reflect_placement(const Placement& placement, const ReflectionPlane& plane) {
  // mirror(x) = M x + 2 o e_axis
  Vec3 shift = Vec3::Zero();
  shift[plane.axis] = 2.0 * plane.offset;
  return {placement.linear * plane.matrix(), placement.linear * shift + placement.translation};
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "focal lengths must be positive");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx <= image_width && cy >= 0.0 && cy <= image_height)) {
    throw Error(ErrorCode::InvalidArgument, "principal point outside image");
  }
}

Vec3 transform_point(const Pose& pose, const Vec3& p) {
  return pose.rotation() * p + pose.translation();
}

Vec2 project_point(const CameraIntrinsics& intr, const Vec3& p_cam) {
  if (!(p_cam.z() > 0.0)) {
    throw Error(ErrorCode::PointBehindCamera, "z must be positive");
  }
  return {intr.fx * p_cam.x() / p_cam.z() + intr.cx, intr.fy * p_cam.y() / p_cam.z() + intr.cy};
}

TriangleMesh mesh_stats(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
  if (vertices.empty() || faces.empty()) {
    throw Error(ErrorCode::EmptyMesh, "mesh needs at least one vertex and one face");
  }
  const int n = static_cast<int>(vertices.size());
  for (const auto& f : faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::InvalidArgument, "face index out of range");
      }
    }
  }

  TriangleMesh mesh;
  mesh.aabb.min = vertices.front();
  mesh.aabb.max = vertices.front();
  for (const auto& v : vertices) {
    mesh.aabb.min = mesh.aabb.min.cwiseMin(v);
    mesh.aabb.max = mesh.aabb.max.cwiseMax(v);
  }

  double best_sq = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      best_sq = std::max(best_sq, (vertices[i] - vertices[j]).squaredNorm());
    }
  }
  mesh.diameter = std::sqrt(best_sq);
  mesh.vertices = std::move(vertices);
  mesh.faces = std::move(faces);
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MeshLoadFailure, "cannot open " + path.string());
  }
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) {
        throw Error(ErrorCode::MeshLoadFailure, "bad vertex on line " + std::to_string(line_no));
      }
      vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (tokens.size() != 3) {
        throw Error(ErrorCode::MeshLoadFailure,
                    "only triangular faces are supported (line " + std::to_string(line_no) + ")");
      }
      std::array<int, 3> face{};
      for (int k = 0; k < 3; ++k) face[k] = parse_face_index(tokens[k], vertices.size(), line_no);
      faces.push_back(face);
    }
  }
  try {
    return mesh_stats(std::move(vertices), std::move(faces));
  } catch (const Error& e) {
    throw Error(ErrorCode::MeshLoadFailure, path.string() + ": " + e.what());
  }
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  }
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

TriangleMesh make_box_mesh(const Vec3& size) {
  const Vec3 h = 0.5 * size;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  std::vector<std::array<int, 3>> f = {
      {0, 2, 3}, {0, 3, 1},  // z-
      {4, 5, 7}, {4, 7, 6},  // z+
      {0, 1, 5}, {0, 5, 4},  // y-
      {2, 6, 7}, {2, 7, 3},  // y+
      {0, 4, 6}, {0, 6, 2},  // x-
      {1, 3, 7}, {1, 7, 5},  // x+
  };
  return mesh_stats(std::move(v), std::move(f));
}

TriangleMesh make_house_mesh(double skew) {
  constexpr double a = 0.05, c = 0.03, y0 = -0.04, y1 = 0.02, y2 = 0.06;
  std::vector<Vec3> v = {
      {-a, y0, -c}, {a, y0, -c}, {a, y1, -c}, {-a, y1, -c},
      {-a, y0, c},  {a, y0, c},  {a, y1, c},  {-a, y1, c},
      {skew, y2, -c}, {skew, y2, c},
  };
  std::vector<std::array<int, 3>> f = {
      {0, 1, 5}, {0, 5, 4},                        // floor
      {0, 3, 2}, {0, 2, 1}, {3, 8, 2},             // front wall and gable
      {4, 5, 6}, {4, 6, 7}, {7, 6, 9},             // back wall and gable
      {0, 4, 7}, {0, 7, 3},                        // left wall
      {1, 2, 6}, {1, 6, 5},                        // right wall
      {3, 7, 9}, {3, 9, 8},                        // roof, left slope
      {2, 8, 9}, {2, 9, 6},                        // roof, right slope
  };

  // Three rounds of midpoint subdivision give ~500 vertices, enough for
  // meaningful ADD averages without slowing the O(n^2) diameter.
  for (int round = 0; round < 3; ++round) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back(0.5 * (v[i] + v[j]));
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return mesh_stats(std::move(v), std::move(f));
}

Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Mat3 random_rotation(Rng& rng) {
  // Shoemake's subgroup algorithm.
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double u1 = uniform_unit(rng), u2 = uniform_unit(rng), u3 = uniform_unit(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const Eigen::Quaterniond q(b * std::cos(kTwoPi * u3), a * std::sin(kTwoPi * u2),
                             a * std::cos(kTwoPi * u2), b * std::sin(kTwoPi * u3));
  return orthonormalize(q.normalized().toRotationMatrix());
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  // atan2 form stays accurate near zero where acos((tr-1)/2) does not.
  const Vec3 axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  return std::atan2(0.5 * axis.norm(), 0.5 * (rel.trace() - 1.0));
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

}  // namespace sccn
