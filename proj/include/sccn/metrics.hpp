#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sccn/geometry.hpp"

namespace sccn {

enum class AddMode { Add, AddS, AddSPrime };

std::string_view to_string(AddMode mode) noexcept;
/// "ADD", "ADD-S", "ADD-S-PRIME".
AddMode parse_add_mode(std::string_view text);

/// Average model-point distance between ground truth and estimate.
///   ADD       mean ||gt(x) - est(x)||
///   ADD-S     mean over x of min over y ||gt(x) - est(y)||   (exhaustive)
///   ADD-S'    min(ADD(est), ADD(est o mirror))
/// The mirror is taken about the actual plane, which is the same as moving
/// the model so the plane contains the origin and applying the reflection
/// matrix there. Placements may be
/// improper (a mirrored ground truth). Throws EmptyPointSet and, for ADD-S'
/// without a plane, MissingReflection.
double add_metric(const Placement& gt, const Placement& est, std::span<const Vec3> points,
                  AddMode mode, const std::optional<ReflectionPlane>& refl = std::nullopt);

struct EvalRecord {
  double add = 0.0;
  double add_s = 0.0;
  std::optional<double> add_s_prime;
  double diameter = 0.0;
  bool pass_add = false;
  bool pass_add_s = false;
  std::optional<bool> pass_add_s_prime;
};

/// A score passes when strictly below 10% of the diameter.
bool passes_threshold(double score, double diameter);

EvalRecord evaluate_pose(const Placement& gt, const Placement& est, std::span<const Vec3> points,
                         double diameter, const std::optional<ReflectionPlane>& refl = std::nullopt);

/// Fraction of scores strictly below 0.1 * diameter.
double accuracy_at_threshold(std::span<const double> scores, double diameter);

/// At most `cap` points taken at a fixed index stride.
std::vector<Vec3> sample_eval_points(std::span<const Vec3> vertices, std::size_t cap = 1000);

}  // namespace sccn
