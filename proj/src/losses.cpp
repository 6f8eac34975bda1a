#include "sccn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "sccn/errors.hpp"

namespace sccn {

void LossWeights::validate() const {
  if (lambda_tversky < 0.0 || lambda_ce < 0.0 || lambda_cntr < 0.0 || tversky_alpha < 0.0 ||
      tversky_beta < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "loss weights must be non-negative");
  }
}

double seg_loss(const ImageF& pred_prob, const ImageF& gt, const LossWeights& w) {
  if (!pred_prob.same_shape(gt)) throw Error(ErrorCode::ShapeMismatch, "prediction and target differ");
  w.validate();
  const auto pred = pred_prob.data();
  const auto target = gt.data();
  if (pred.empty()) return 0.0;

  double tp = 0.0, fp = 0.0, fn = 0.0, ce = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double g = target[i];
    tp += p * g;
    fp += p * (1.0 - g);
    fn += (1.0 - p) * g;
    ce -= g * std::log(p) + (1.0 - g) * std::log(1.0 - p);
  }
  ce /= static_cast<double>(pred.size());
  const double denom = tp + w.tversky_alpha * fp + w.tversky_beta * fn;
  const double tversky = denom > 0.0 ? 1.0 - tp / denom : 0.0;
  return w.lambda_tversky * tversky + w.lambda_ce * ce;
}

double colorcode_loss(const ImageF& gt_cc, const ImageF& pred_cc, const ImageF& contour,
                      double lambda_cntr) {
  if (!gt_cc.same_shape(pred_cc) || !contour.same_shape(gt_cc.width(), gt_cc.height(), 1)) {
    throw Error(ErrorCode::ShapeMismatch, "color-code maps and contour differ in shape");
  }
  const auto n = gt_cc.data().size();
  if (n == 0) return 0.0;
  double plain = 0.0, weighted = 0.0;
  for (int y = 0; y < gt_cc.height(); ++y) {
    for (int x = 0; x < gt_cc.width(); ++x) {
      for (int c = 0; c < gt_cc.channels(); ++c) {
        const double d = gt_cc(x, y, c) - pred_cc(x, y, c);
        plain += std::abs(d);
        weighted += std::abs(contour(x, y) * d);
      }
    }
  }
  return plain / static_cast<double>(n) + lambda_cntr * weighted / static_cast<double>(n);
}

double symmetry_loss(const ImageF& gt_symm, const ImageF& pred_symm) {
  if (!gt_symm.same_shape(pred_symm)) throw Error(ErrorCode::ShapeMismatch, "symmetry maps differ");
  const int ch = gt_symm.channels();
  double loss = 0.0;
  for (int c = 0; c < ch; ++c) {
    double support = 0.0, agreement = 0.0;
    for (int y = 0; y < gt_symm.height(); ++y) {
      for (int x = 0; x < gt_symm.width(); ++x) {
        const double g = gt_symm(x, y, c);
        if (g != 0.0 && g != 1.0 && g != -1.0) {
          throw Error(ErrorCode::InvalidArgument, "symmetry labels must be -1, 0 or +1");
        }
        support += std::abs(g);
        agreement += g * pred_symm(x, y, c);
      }
    }
    loss += support - std::abs(agreement);
  }
  return loss;
}

}  // namespace sccn
