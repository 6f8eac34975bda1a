#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sccn/geometry.hpp"
#include "sccn/sparse_select.hpp"

namespace sccn {

struct RansacParams {
  int max_iterations = 200;
  double inlier_threshold = 2.0;  // pixels
  double confidence = 0.999;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct PnPResult {
  Pose pose;
  std::vector<std::size_t> inlier_indices;
  double mean_reprojection_error = 0.0;  // pixels, over inliers
  int iterations_used = 0;
  double elapsed_seconds = 0.0;
};

/// Unit bearing of a pixel under the pinhole model.
Vec3 pixel_bearing(const CameraIntrinsics& intr, const Vec2& pixel);

/// Three-point resection (Grunert's quartic). Returns every real, positive
/// solution whose reprojection of the three points is below 1e-6 px, at
/// most four. Throws DegenerateConfiguration for coincident or collinear
/// model points and NoRealSolution when no root survives.
std::vector<Pose> p3p_solve(std::span<const Vec3, 3> model_points, std::span<const Vec2, 3> pixels,
                            const CameraIntrinsics& intr);

/// Squared pixel error of one correspondence, or +inf if it projects from
/// behind the camera.
double squared_reprojection_error(const Pose& pose, const Correspondence& c,
                                  const CameraIntrinsics& intr);

/// Sum of squared reprojection errors; +inf if any point is behind the
/// camera.
double reprojection_cost(const Pose& pose, std::span<const Correspondence> corr,
                         const CameraIntrinsics& intr);

/// Damped Gauss-Newton on the six pose parameters (left-multiplied
/// axis-angle increment and additive translation) minimising summed squared
/// reprojection error. Damping starts at 1e-3 and moves by x10 / /10 on
/// rejected / accepted steps. Never returns a pose with higher cost than
/// `initial`. Throws TooFewPoints below four correspondences and
/// DivergedRefinement if no damping level yields a finite, lower cost from
/// a non-converged start.
Pose refine_pose(const Pose& initial, std::span<const Correspondence> corr,
                 const CameraIntrinsics& intr);

/// Seeded RANSAC over four-point samples: three feed the minimal solver and
/// the fourth picks among its roots. The iteration bound adapts to the best
/// inlier ratio at the requested confidence. The winner is refined on its
/// inliers and the inlier set recomputed under the refined pose. Throws
/// TooFewPoints below four correspondences and ConsensusFailure when no
/// hypothesis reaches four inliers.
PnPResult ransac_pnp(const CorrespondenceSet& corr, const CameraIntrinsics& intr,
                     const RansacParams& params);

}  // namespace sccn
