#include "sccn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sccn/errors.hpp"

namespace sccn {

namespace {

double mean_distance(const Placement& a, const Placement& b, std::span<const Vec3> points) {
  double sum = 0.0;
  for (const Vec3& x : points) sum += (a.apply(x) - b.apply(x)).norm();
  return sum / static_cast<double>(points.size());
}

}  // namespace

std::string_view to_string(AddMode mode) noexcept {
  switch (mode) {
    case AddMode::Add: return "ADD";
    case AddMode::AddS: return "ADD-S";
    case AddMode::AddSPrime: return "ADD-S-PRIME";
  }
  return "?";
}

AddMode parse_add_mode(std::string_view text) {
  if (text == "ADD") return AddMode::Add;
  if (text == "ADD-S") return AddMode::AddS;
  if (text == "ADD-S-PRIME") return AddMode::AddSPrime;
  throw Error(ErrorCode::InvalidArgument, "unknown metric mode '" + std::string(text) + "'");
}

double add_metric(const Placement& gt, const Placement& est, std::span<const Vec3> points,
                  AddMode mode, const std::optional<ReflectionPlane>& refl) {
  if (points.empty()) throw Error(ErrorCode::EmptyPointSet, "no evaluation points");
  switch (mode) {
    case AddMode::Add:
      return mean_distance(gt, est, points);

    case AddMode::AddS: {
      std::vector<Vec3> est_pts(points.size());
      for (std::size_t i = 0; i < points.size(); ++i) est_pts[i] = est.apply(points[i]);
      double sum = 0.0;
      for (const Vec3& x : points) {
        const Vec3 g = gt.apply(x);
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& e : est_pts) best = std::min(best, (g - e).squaredNorm());
        sum += std::sqrt(best);
      }
      return sum / static_cast<double>(points.size());
    }

    case AddMode::AddSPrime: {
      if (!refl) throw Error(ErrorCode::MissingReflection, "ADD-S' needs a reflection plane");
      // Composing with the mirror about the actual plane equals shifting the
      // model so the plane contains the origin and applying I - 2 n n^T.
      return std::min(mean_distance(gt, est, points),
                      mean_distance(gt, reflect_placement(est, *refl), points));
    }
  }
  return 0.0;
}

bool passes_threshold(double score, double diameter) { return score < 0.1 * diameter; }

EvalRecord evaluate_pose(const Placement& gt, const Placement& est, std::span<const Vec3> points,
                         double diameter, const std::optional<ReflectionPlane>& refl) {
  EvalRecord r;
  r.diameter = diameter;
  r.add = add_metric(gt, est, points, AddMode::Add);
  r.add_s = add_metric(gt, est, points, AddMode::AddS);
  r.pass_add = passes_threshold(r.add, diameter);
  r.pass_add_s = passes_threshold(r.add_s, diameter);
  if (refl) {
    r.add_s_prime = add_metric(gt, est, points, AddMode::AddSPrime, refl);
    r.pass_add_s_prime = passes_threshold(*r.add_s_prime, diameter);
  }
  return r;
}

double accuracy_at_threshold(std::span<const double> scores, double diameter) {
  if (!(diameter > 0.0)) throw Error(ErrorCode::InvalidArgument, "diameter must be positive");
  if (scores.empty()) return 0.0;
  const auto passed = std::count_if(scores.begin(), scores.end(),
                                    [&](double s) { return passes_threshold(s, diameter); });
  return static_cast<double>(passed) / static_cast<double>(scores.size());
}

std::vector<Vec3> sample_eval_points(std::span<const Vec3> vertices, std::size_t cap) {
  if (cap == 0 || vertices.size() <= cap) return {vertices.begin(), vertices.end()};
  const std::size_t stride = (vertices.size() + cap - 1) / cap;
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < vertices.size(); i += stride) out.push_back(vertices[i]);
  return out;
}

}  // namespace sccn
