#pragma once

#include "sccn/image.hpp"

namespace sccn {

struct LossWeights {
  double lambda_tversky = 1.0;
  double lambda_ce = 1.0;
  double lambda_cntr = 5.0;
  double tversky_alpha = 0.5;  // false-positive weight
  double tversky_beta = 0.5;   // false-negative weight

  void validate() const;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// lambda_T * (1 - TP / (TP + alpha FP + beta FN)) + lambda_CE * mean BCE,
/// with soft counts over predictions clamped to [eps, 1 - eps].
double seg_loss(const ImageF& pred_prob, const ImageF& gt, const LossWeights& w = {});

/// mean|gt - pred| + lambda * mean|contour * (gt - pred)|, means taken over
/// pixels x channels. `contour` is single-channel and broadcast.
double colorcode_loss(const ImageF& gt_cc, const ImageF& pred_cc, const ImageF& contour,
                      double lambda_cntr = 5.0);

/// Per channel sum|gt| - |sum gt * pred|, summed over channels. Invariant
/// under a global sign flip of the prediction.
double symmetry_loss(const ImageF& gt_symm, const ImageF& pred_symm);

}  // namespace sccn
