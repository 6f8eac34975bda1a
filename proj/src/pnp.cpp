#include "sccn/pnp.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "sccn/errors.hpp"

namespace sccn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kP3PReprojectionTolerance = 1e-6;

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Real roots of a polynomial given highest-degree-first coefficients, via the
// companion matrix. Leading coefficients negligible relative to the rest are
// dropped.
std::vector<double> real_roots(std::vector<double> coeffs) {
  const double scale = std::abs(*std::max_element(coeffs.begin(), coeffs.end(),
                                                  [](double a, double b) { return std::abs(a) < std::abs(b); }));
  if (scale == 0.0) return {};
  while (coeffs.size() > 1 && std::abs(coeffs.front()) <= 1e-14 * scale) coeffs.erase(coeffs.begin());
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree < 1) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 0; i < degree; ++i) companion(0, i) = -coeffs[i + 1] / coeffs[0];
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);

  auto eval = [&](double x, double& d) {
    double f = 0.0;
    d = 0.0;
    for (double c : coeffs) {
      d = d * x + f;
      f = f * x + c;
    }
    return f;
  };

  std::vector<double> roots;
  for (int i = 0; i < degree; ++i) {
    const std::complex<double> z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z.real()))) continue;
    double x = z.real();
    for (int k = 0; k < 4; ++k) {
      double d;
      const double f = eval(x, d);
      if (d == 0.0) break;
      const double step = f / d;
      x -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    roots.push_back(x);
  }
  return roots;
}

// Largest real root of m^3 + a m^2 + b m + c.
double largest_cubic_root(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  double t;
  if (disc > 0.0) {
    const double sd = std::sqrt(disc);
    t = std::cbrt(-0.5 * q + sd) + std::cbrt(-0.5 * q - sd);
  } else if (p < 0.0) {
    const double r = std::sqrt(-p / 3.0);
    const double arg = std::clamp(-0.5 * q / (r * r * r), -1.0, 1.0);
    t = 2.0 * r * std::cos(std::acos(arg) / 3.0);
  } else {
    t = 0.0;
  }
  double m = t - a / 3.0;
  for (int k = 0; k < 2; ++k) {
    const double f = ((m + a) * m + b) * m + c;
    const double d = (3.0 * m + 2.0 * a) * m + b;
    if (d == 0.0) break;
    m -= f / d;
  }
  return m;
}

// Real roots of a quartic (highest degree first) by Ferrari's method. Near
// double roots a slightly negative discriminant is treated as zero, so a
// spurious candidate may appear; callers validate every root. Returns false
// when the leading coefficient is too small for the closed form.
bool quartic_roots(const std::array<double, 5>& coeffs, std::vector<double>& roots) {
  roots.clear();
  const double scale = std::max({std::abs(coeffs[0]), std::abs(coeffs[1]), std::abs(coeffs[2]),
                                 std::abs(coeffs[3]), std::abs(coeffs[4])});
  if (!(scale > 0.0) || std::abs(coeffs[0]) <= 1e-10 * scale) return false;
  const double a = coeffs[1] / coeffs[0], b = coeffs[2] / coeffs[0];
  const double c = coeffs[3] / coeffs[0], d = coeffs[4] / coeffs[0];
  const double a2 = a * a;
  const double p = b - 3.0 * a2 / 8.0;
  const double q = c - a * b / 2.0 + a2 * a / 8.0;
  const double r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
  const double shift = -a / 4.0;
  const double tol = 1e-10 * std::max({1.0, std::abs(p) * std::abs(p), std::abs(r)});

  auto quadratic = [&](double s, double t) {
    double disc = s * s - 4.0 * t;
    if (disc < 0.0 && disc > -tol) disc = 0.0;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    roots.push_back(0.5 * (-s + sq) + shift);
    roots.push_back(0.5 * (-s - sq) + shift);
  };

  if (std::abs(q) <= 1e-14 * std::max(1.0, std::abs(p))) {
    double disc = p * p - 4.0 * r;
    if (disc < 0.0 && disc > -tol) disc = 0.0;
    if (disc < 0.0) return true;
    for (double z : {0.5 * (-p + std::sqrt(disc)), 0.5 * (-p - std::sqrt(disc))}) {
      if (z < 0.0 && z > -std::sqrt(tol)) z = 0.0;
      if (z < 0.0) continue;
      roots.push_back(std::sqrt(z) + shift);
      roots.push_back(-std::sqrt(z) + shift);
    }
  } else {
    const double m = largest_cubic_root(p, 0.25 * p * p - r, -0.125 * q * q);
    if (!(m > 0.0)) return false;
    const double s = std::sqrt(2.0 * m);
    const double h = q / (2.0 * s);
    quadratic(s, 0.5 * p + m - h);
    quadratic(-s, 0.5 * p + m + h);
  }

  for (double& x : roots) {
    for (int k = 0; k < 4; ++k) {
      const double f = (((coeffs[0] * x + coeffs[1]) * x + coeffs[2]) * x + coeffs[3]) * x + coeffs[4];
      const double df = ((4.0 * coeffs[0] * x + 3.0 * coeffs[1]) * x + 2.0 * coeffs[2]) * x + coeffs[3];
      if (df == 0.0) break;
      const double step = f / df;
      x -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
  }
  return true;
}

// Rotation and translation carrying the triangle `src` onto the congruent
// triangle `dst`, from orthonormal frames built on each.
bool triad_align(const std::array<Vec3, 3>& src, const std::array<Vec3, 3>& dst, Mat3& rot, Vec3& trans) {
  auto frame = [](const std::array<Vec3, 3>& t, Mat3& f) {
    const Vec3 e1 = t[1] - t[0];
    const Vec3 n = e1.cross(t[2] - t[0]);
    const double l1 = e1.norm(), ln = n.norm();
    if (!(l1 > 0.0) || !(ln > 0.0)) return false;
    f.col(0) = e1 / l1;
    f.col(2) = n / ln;
    f.col(1) = f.col(2).cross(f.col(0));
    return true;
  };
  Mat3 fs, fd;
  if (!frame(src, fs) || !frame(dst, fd)) return false;
  rot = fd * fs.transpose();
  const Vec3 cs = (src[0] + src[1] + src[2]) / 3.0;
  const Vec3 cd = (dst[0] + dst[1] + dst[2]) / 3.0;
  trans = cd - rot * cs;
  return rot.allFinite() && trans.allFinite();
}

// Newton refinement of the three camera distances against the law-of-cosines
// system.
bool polish_distances(Vec3& s, double a2, double b2, double c2, double ca, double cb, double cg) {
  for (int it = 0; it < 8; ++it) {
    const Vec3 f(s[1] * s[1] + s[2] * s[2] - 2.0 * s[1] * s[2] * ca - a2,
                 s[0] * s[0] + s[2] * s[2] - 2.0 * s[0] * s[2] * cb - b2,
                 s[0] * s[0] + s[1] * s[1] - 2.0 * s[0] * s[1] * cg - c2);
    Mat3 j;
    j << 0.0, 2.0 * (s[1] - s[2] * ca), 2.0 * (s[2] - s[1] * ca),
        2.0 * (s[0] - s[2] * cb), 0.0, 2.0 * (s[2] - s[0] * cb),
        2.0 * (s[0] - s[1] * cg), 2.0 * (s[1] - s[0] * cg), 0.0;
    Mat3 inv;
    bool invertible = false;
    j.computeInverseWithCheck(inv, invertible);
    if (!invertible) break;
    const Vec3 step = inv * f;
    if (!step.allFinite()) break;
    s -= step;
    if (step.norm() <= 1e-15 * s.norm()) break;
  }
  return s.allFinite() && (s.array() > 0.0).all();
}

}  // namespace

void RansacParams::validate() const {
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (!(inlier_threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "inlier_threshold must be > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence must lie in (0, 1)");
  }
}

Vec3 pixel_bearing(const CameraIntrinsics& intr, const Vec2& pixel) {
  return Vec3((pixel.x() - intr.cx) / intr.fx, (pixel.y() - intr.cy) / intr.fy, 1.0).normalized();
}

namespace {

enum class P3PStatus { Ok, Degenerate, NoSolution };

// Solutions are appended to `poses`, which is cleared first.
P3PStatus p3p_core(const std::array<Vec3, 3>& model, const std::array<Vec2, 3>& pixels,
                   const CameraIntrinsics& intr, std::vector<Pose>& poses) {
  poses.clear();
  const Vec3& p1 = model[0];
  const Vec3& p2 = model[1];
  const Vec3& p3 = model[2];
  const double a2 = (p2 - p3).squaredNorm();
  const double b2 = (p1 - p3).squaredNorm();
  const double c2 = (p1 - p2).squaredNorm();
  const double longest2 = std::max({a2, b2, c2});
  if (!(longest2 > 0.0) || (p2 - p1).cross(p3 - p1).norm() <= 1e-10 * longest2) return P3PStatus::Degenerate;

  const Vec3 j1 = pixel_bearing(intr, pixels[0]);
  const Vec3 j2 = pixel_bearing(intr, pixels[1]);
  const Vec3 j3 = pixel_bearing(intr, pixels[2]);
  const double ca = j2.dot(j3), cb = j1.dot(j3), cg = j1.dot(j2);

  // Grunert: s2 = u s1, s3 = v s1; quartic in v.
  const double q = (a2 - c2) / b2;
  const double p = (a2 + c2) / b2;
  const double c_b = c2 / b2, a_b = a2 / b2;
  const std::array<double, 5> quartic{
      (q - 1.0) * (q - 1.0) - 4.0 * c_b * ca * ca,
      4.0 * (q * (1.0 - q) * cb - (1.0 - p) * ca * cg + 2.0 * c_b * ca * ca * cb),
      2.0 * (q * q - 1.0 + 2.0 * q * q * cb * cb + 2.0 * (b2 - c2) / b2 * ca * ca - 4.0 * p * ca * cb * cg +
             2.0 * (b2 - a2) / b2 * cg * cg),
      4.0 * (-q * (1.0 + q) * cb + 2.0 * a_b * cg * cg * cb - (1.0 - p) * ca * cg),
      (1.0 + q) * (1.0 + q) - 4.0 * a_b * cg * cg};

  thread_local std::vector<double> roots;
  if (!quartic_roots(quartic, roots)) roots = real_roots({quartic.begin(), quartic.end()});

  for (double v : roots) {
    if (!(v > 0.0)) continue;
    const double den = 2.0 * (cg - v * ca);
    if (std::abs(den) < 1e-14) continue;
    const double u = ((q - 1.0) * v * v - 2.0 * q * cb * v + 1.0 + q) / den;
    if (!(u > 0.0)) continue;
    const double s1_sq = c2 / (1.0 + u * u - 2.0 * u * cg);
    if (!(s1_sq > 0.0)) continue;
    const double s1 = std::sqrt(s1_sq);
    Vec3 s(s1, u * s1, v * s1);
    if (!polish_distances(s, a2, b2, c2, ca, cb, cg)) continue;

    const std::array<Vec3, 3> cam = {s[0] * j1, s[1] * j2, s[2] * j3};
    Mat3 rot;
    Vec3 trans;
    if (!triad_align(model, cam, rot, trans)) continue;
    if ((rot.transpose() * rot - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10) continue;
    bool valid = true;
    for (int k = 0; k < 3 && valid; ++k) {
      const Vec3 pc = rot * model[k] + trans;
      valid = pc.z() > 0.0 && (project_point(intr, pc) - pixels[k]).norm() < kP3PReprojectionTolerance;
    }
    if (!valid) continue;
    const bool duplicate = std::any_of(poses.begin(), poses.end(), [&](const Pose& other) {
      return (other.rotation() - rot).norm() < 1e-9 &&
             (other.translation() - trans).norm() < 1e-9 * (1.0 + trans.norm());
    });
    if (!duplicate) poses.emplace_back(rot, trans);
  }
  return poses.empty() ? P3PStatus::NoSolution : P3PStatus::Ok;
}

}  // namespace

std::vector<Pose> p3p_solve(std::span<const Vec3, 3> model_points, std::span<const Vec2, 3> pixels,
                            const CameraIntrinsics& intr) {
  std::vector<Pose> poses;
  const P3PStatus status = p3p_core({model_points[0], model_points[1], model_points[2]},
                                    {pixels[0], pixels[1], pixels[2]}, intr, poses);
  if (status == P3PStatus::Degenerate) {
    throw Error(ErrorCode::DegenerateConfiguration, "model points are coincident or collinear");
  }
  if (status == P3PStatus::NoSolution) throw Error(ErrorCode::NoRealSolution, "no valid three-point solution");
  return poses;
}

double squared_reprojection_error(const Pose& pose, const Correspondence& c,
                                  const CameraIntrinsics& intr) {
  const Vec3 pc = transform_point(pose, c.model_point);
  if (!(pc.z() > 0.0)) return kInf;
  return (project_point(intr, pc) - c.pixel).squaredNorm();
}

double reprojection_cost(const Pose& pose, std::span<const Correspondence> corr,
                         const CameraIntrinsics& intr) {
  double cost = 0.0;
  for (const auto& c : corr) {
    const double e = squared_reprojection_error(pose, c, intr);
    if (!std::isfinite(e)) return kInf;
    cost += e;
  }
  return cost;
}

Pose refine_pose(const Pose& initial, std::span<const Correspondence> corr,
                 const CameraIntrinsics& intr) {
  constexpr int kMaxIterations = 100;
  constexpr int kMaxRetries = 10;
  constexpr double kStepTolerance = 1e-10;
  constexpr double kDecreaseTolerance = 1e-12;

  if (corr.size() < 4) throw Error(ErrorCode::TooFewPoints, "refinement needs at least 4 points");
  double cost = reprojection_cost(initial, corr, intr);
  if (!std::isfinite(cost)) {
    throw Error(ErrorCode::DivergedRefinement, "initial pose places points behind the camera");
  }

  Mat3 rot = initial.rotation();
  Vec3 trans = initial.translation();
  double lambda = 1e-3;

  for (int it = 0; it < kMaxIterations; ++it) {
    Mat6 jtj = Mat6::Zero();
    Vec6 jtr = Vec6::Zero();
    for (const auto& c : corr) {
      const Vec3 q = rot * c.model_point;
      const Vec3 pc = q + trans;
      const double iz = 1.0 / pc.z();
      const Vec2 r(intr.fx * pc.x() * iz + intr.cx - c.pixel.x(),
                   intr.fy * pc.y() * iz + intr.cy - c.pixel.y());
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << intr.fx * iz, 0.0, -intr.fx * pc.x() * iz * iz,
               0.0, intr.fy * iz, -intr.fy * pc.y() * iz * iz;
      Eigen::Matrix<double, 3, 6> dp;
      dp.leftCols<3>() << 0.0, q.z(), -q.y(),
                          -q.z(), 0.0, q.x(),
                          q.y(), -q.x(), 0.0;
      dp.rightCols<3>() = Mat3::Identity();
      const Eigen::Matrix<double, 2, 6> j = dproj * dp;
      jtj.noalias() += j.transpose() * j;
      jtr.noalias() += j.transpose() * r;
    }

    bool accepted = false;
    bool converged = false;
    for (int retry = 0; retry < kMaxRetries; ++retry) {
      Mat6 damped = jtj;
      for (int k = 0; k < 6; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Vec6 delta = damped.ldlt().solve(-jtr);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      if (delta.norm() < kStepTolerance) {
        converged = true;
        break;
      }
      const Vec3 omega = delta.head<3>();
      const double angle = omega.norm();
      const Mat3 cand_rot = angle > 0.0 ? Mat3(Eigen::AngleAxisd(angle, omega / angle) * rot) : rot;
      const Vec3 cand_trans = trans + delta.tail<3>();

      double cand_cost = 0.0;
      for (const auto& c : corr) {
        const Vec3 pc = cand_rot * c.model_point + cand_trans;
        if (!(pc.z() > 0.0)) {
          cand_cost = kInf;
          break;
        }
        cand_cost += (Vec2(intr.fx * pc.x() / pc.z() + intr.cx, intr.fy * pc.y() / pc.z() + intr.cy) -
                      c.pixel).squaredNorm();
      }
      if (std::isfinite(cand_cost) && cand_cost < cost) {
        const double decrease = cost - cand_cost;
        rot = cand_rot;
        trans = cand_trans;
        cost = cand_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = decrease < kDecreaseTolerance;
        break;
      }
      lambda *= 10.0;
    }
    if (converged) break;
    if (!accepted) {
      if (it == 0 && cost > kDecreaseTolerance) {
        throw Error(ErrorCode::DivergedRefinement, "no damping level reduced the error");
      }
      break;
    }
  }

  const Pose refined(orthonormalize(rot), trans);
  // Re-orthonormalisation can nudge the cost by rounding; keep the promise.
  if (reprojection_cost(refined, corr, intr) > reprojection_cost(initial, corr, intr)) return initial;
  return refined;
}

PnPResult ransac_pnp(const CorrespondenceSet& corr, const CameraIntrinsics& intr,
                     const RansacParams& params) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  const std::size_t n = corr.size();
  if (n < 4) throw Error(ErrorCode::TooFewPoints, "RANSAC needs at least 4 correspondences");

  const double thr2 = params.inlier_threshold * params.inlier_threshold;
  Rng rng(params.rng_seed);

  struct Score {
    std::size_t inliers = 0;
    double mean_error = kInf;
  };
  auto score_pose = [&](const Pose& pose, std::vector<std::size_t>* inliers) {
    Score s;
    double sum = 0.0;
    if (inliers) inliers->clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double e2 = squared_reprojection_error(pose, corr[i], intr);
      if (e2 <= thr2) {
        ++s.inliers;
        sum += std::sqrt(e2);
        if (inliers) inliers->push_back(i);
      }
    }
    if (s.inliers > 0) s.mean_error = sum / static_cast<double>(s.inliers);
    return s;
  };
  auto better = [](const Score& a, const Score& b) {
    return a.inliers > b.inliers || (a.inliers == b.inliers && a.mean_error < b.mean_error);
  };

  Score best;
  Pose best_pose;
  int needed = params.max_iterations;
  int iterations = 0;
  const double log_fail = std::log(1.0 - params.confidence);
  std::vector<Pose> candidates;

  for (int it = 0; it < needed; ++it) {
    iterations = it + 1;
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = uniform_index(rng, n);
        fresh = std::find(idx.begin(), idx.begin() + k, idx[k]) == idx.begin() + k;
      } while (!fresh);
    }
    const std::array<Vec3, 3> pts = {corr[idx[0]].model_point, corr[idx[1]].model_point,
                                     corr[idx[2]].model_point};
    const std::array<Vec2, 3> pix = {corr[idx[0]].pixel, corr[idx[1]].pixel, corr[idx[2]].pixel};
    if (p3p_core(pts, pix, intr, candidates) != P3PStatus::Ok) continue;

    const Pose* chosen = nullptr;
    double chosen_err = kInf;
    for (const Pose& cand : candidates) {
      bool in_front = true;
      for (std::size_t k : idx) in_front = in_front && transform_point(cand, corr[k].model_point).z() > 0.0;
      if (!in_front) continue;
      const double e = squared_reprojection_error(cand, corr[idx[3]], intr);
      if (e < chosen_err) {
        chosen_err = e;
        chosen = &cand;
      }
    }
    if (chosen == nullptr) continue;

    const Score s = score_pose(*chosen, nullptr);
    if (!better(s, best)) continue;
    best = s;
    best_pose = *chosen;

    const double w = static_cast<double>(s.inliers) / static_cast<double>(n);
    const double all_good = std::pow(w, 4);
    if (all_good >= 1.0) {
      needed = std::min(needed, it + 1);
    } else if (all_good > 0.0) {
      const double bound = std::ceil(log_fail / std::log(1.0 - all_good));
      if (bound < needed) needed = std::max(it + 1, static_cast<int>(bound));
    }
  }

  if (best.inliers < 4) throw Error(ErrorCode::ConsensusFailure, "no hypothesis reached 4 inliers");

  PnPResult result;
  result.pose = best_pose;
  score_pose(best_pose, &result.inlier_indices);
  for (int round = 0; round < 3; ++round) {
    CorrespondenceSet subset;
    subset.reserve(result.inlier_indices.size());
    for (std::size_t i : result.inlier_indices) subset.push_back(corr[i]);
    Pose refined;
    try {
      refined = refine_pose(result.pose, subset, intr);
    } catch (const Error&) {
      break;
    }
    std::vector<std::size_t> inliers;
    score_pose(refined, &inliers);
    if (inliers.size() < 4) break;
    const bool same = inliers == result.inlier_indices;
    result.pose = refined;
    result.inlier_indices = std::move(inliers);
    if (same) break;
  }

  double sum = 0.0;
  for (std::size_t i : result.inlier_indices) {
    sum += std::sqrt(squared_reprojection_error(result.pose, corr[i], intr));
  }
  result.mean_reprojection_error = sum / static_cast<double>(result.inlier_indices.size());
  result.iterations_used = iterations;
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace sccn
