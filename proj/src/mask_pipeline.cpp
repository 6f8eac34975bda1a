#include "sccn/mask_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "sccn/errors.hpp"

namespace sccn {

namespace {

constexpr int kSmooth3[3] = {1, 2, 1};
constexpr int kDeriv3[3] = {-1, 0, 1};
constexpr int kSmooth5[5] = {1, 4, 6, 4, 1};
constexpr int kDeriv5[5] = {-1, -2, 0, 2, 1};
// Largest |response| on [0, 1] input = sum of the positive coefficients.
constexpr double kMax3 = 4.0;
constexpr double kMax5 = 48.0;

ImageF to_luma(const ImageF& image) {
  if (image.channels() == 1) return image;
  if (image.channels() != 3) {
    throw Error(ErrorCode::InvalidArgument, "contour input must have 1 or 3 channels");
  }
  ImageF luma(image.width(), image.height(), 1);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      luma(x, y) = 0.299 * image(x, y, 0) + 0.587 * image(x, y, 1) + 0.114 * image(x, y, 2);
    }
  }
  return luma;
}

template <int N>
void sobel_pair(const ImageF& img, int x, int y, const int (&smooth)[N], const int (&deriv)[N],
                double& gx, double& gy) {
  constexpr int r = N / 2;
  const int w = img.width(), h = img.height();
  gx = 0.0;
  gy = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    const int yy = std::clamp(y + dy, 0, h - 1);
    for (int dx = -r; dx <= r; ++dx) {
      const int xx = std::clamp(x + dx, 0, w - 1);
      const double v = img(xx, yy);
      gx += smooth[dy + r] * deriv[dx + r] * v;
      gy += deriv[dy + r] * smooth[dx + r] * v;
    }
  }
}

}  // namespace

ImageF sobel_magnitude(const ImageF& image) {
  const ImageF luma = to_luma(image);
  ImageF mag(luma.width(), luma.height(), 1, 0.0);
  for (int y = 0; y < luma.height(); ++y) {
    for (int x = 0; x < luma.width(); ++x) {
      double gx3, gy3, gx5, gy5;
      sobel_pair(luma, x, y, kSmooth3, kDeriv3, gx3, gy3);
      sobel_pair(luma, x, y, kSmooth5, kDeriv5, gx5, gy5);
      gx3 /= kMax3;
      gy3 /= kMax3;
      gx5 /= kMax5;
      gy5 /= kMax5;
      // Each normalised response is bounded by 1, so the L2 norm of four is
      // bounded by 2.
      mag(x, y) = 0.5 * std::sqrt(gx3 * gx3 + gy3 * gy3 + gx5 * gx5 + gy5 * gy5);
    }
  }
  return mag;
}

ContourMask sobel_contour(const ImageF& image, double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "contour threshold must lie in [0, 1)");
  }
  const ImageF mag = sobel_magnitude(image);
  ContourMask mask(mag.width(), mag.height(), 1, 0);
  for (int y = 0; y < mag.height(); ++y) {
    for (int x = 0; x < mag.width(); ++x) mask(x, y) = mag(x, y) > threshold ? 1 : 0;
  }
  return mask;
}

ImageF max_pool(const ImageF& map, int factor) {
  if (factor < 1 || map.channels() != 1) {
    throw Error(ErrorCode::InvalidArgument, "max_pool needs a single-channel map and factor >= 1");
  }
  const int pw = (map.width() + factor - 1) / factor;
  const int ph = (map.height() + factor - 1) / factor;
  ImageF pooled(pw, ph, 1, 0.0);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      double& cell = pooled(x / factor, y / factor);
      cell = std::max(cell, map(x, y));
    }
  }
  return pooled;
}

ImageU8 dilate8(const ImageU8& mask) {
  ImageU8 out(mask.width(), mask.height(), 1, 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (mask.contains(x + dx, y + dy)) out(x + dx, y + dy) = 1;
        }
      }
    }
  }
  return out;
}

GrowMaskResult grow_mask(const ProbabilityMap& prob, const GrowMaskParams& params) {
  if (prob.channels() != 1 || prob.empty()) {
    throw Error(ErrorCode::InvalidArgument, "probability map must be a non-empty single channel");
  }
  const auto& th = params.thresholds;
  if (!(th[0] <= th[1] && th[1] <= th[2])) {
    throw Error(ErrorCode::InvalidArgument, "thresholds must be ascending (low, mid, high)");
  }
  const ImageF pooled = max_pool(prob, params.pool_factor);
  auto threshold = [&](double t) {
    ImageU8 m(pooled.width(), pooled.height(), 1, 0);
    for (int y = 0; y < pooled.height(); ++y) {
      for (int x = 0; x < pooled.width(); ++x) m(x, y) = pooled(x, y) >= t ? 1 : 0;
    }
    return m;
  };
  const ImageU8 low = threshold(th[0]);
  const ImageU8 mid = threshold(th[1]);
  const ImageU8 high = threshold(th[2]);
  if (std::none_of(high.data().begin(), high.data().end(), [](std::uint8_t v) { return v != 0; })) {
    throw Error(ErrorCode::NoDetection, "no pixel reaches the high threshold");
  }

  auto intersect = [](ImageU8 a, const ImageU8& b) {
    for (std::size_t i = 0; i < a.data().size(); ++i) a.data()[i] &= b.data()[i];
    return a;
  };
  ImageU8 grown = intersect(dilate8(high), mid);
  grown = intersect(dilate8(grown), low);
  grown = dilate8(grown);

  int cx0 = grown.width(), cy0 = grown.height(), cx1 = -1, cy1 = -1;
  for (int y = 0; y < grown.height(); ++y) {
    for (int x = 0; x < grown.width(); ++x) {
      if (!grown(x, y)) continue;
      cx0 = std::min(cx0, x);
      cy0 = std::min(cy0, y);
      cx1 = std::max(cx1, x);
      cy1 = std::max(cy1, y);
    }
  }
  const int f = params.pool_factor;
  GrowMaskResult result;
  result.bbox.x0 = std::max(0, (cx0 - 1) * f);
  result.bbox.y0 = std::max(0, (cy0 - 1) * f);
  result.bbox.x1 = std::min(prob.width(), (cx1 + 2) * f);
  result.bbox.y1 = std::min(prob.height(), (cy1 + 2) * f);
  result.coarse_mask = std::move(grown);
  return result;
}

Vec2 CropTransform::to_patch(const Vec2& original) const {
  return {(original.x() - bbox.x0) * scale + pad_left, (original.y() - bbox.y0) * scale + pad_top};
}

Vec2 CropTransform::to_original(const Vec2& patch) const {
  return {(patch.x() - pad_left) / scale + bbox.x0, (patch.y() - pad_top) / scale + bbox.y0};
}

CropTransform make_crop_transform(const BoundingBox& bbox, int patch_size) {
  if (bbox.empty()) throw Error(ErrorCode::EmptyBox, "bounding box has zero area");
  if (patch_size < 1) throw Error(ErrorCode::InvalidArgument, "patch size must be positive");
  CropTransform t;
  t.bbox = bbox;
  t.patch_size = patch_size;
  t.scale = static_cast<double>(patch_size) / std::max(bbox.width(), bbox.height());
  t.pad_left = 0.5 * (patch_size - bbox.width() * t.scale);
  t.pad_top = 0.5 * (patch_size - bbox.height() * t.scale);
  return t;
}

CropResult crop_pad_resize(const std::vector<CropLayer>& layers, const BoundingBox& bbox,
                           int patch_size) {
  CropResult result;
  result.transform = make_crop_transform(bbox, patch_size);
  const CropTransform& tf = result.transform;

  for (const CropLayer& layer : layers) {
    if (layer.image == nullptr) throw Error(ErrorCode::InvalidArgument, "null crop layer");
    const ImageF& src = *layer.image;
    if (bbox.x0 < 0 || bbox.y0 < 0 || bbox.x1 > src.width() || bbox.y1 > src.height()) {
      throw Error(ErrorCode::InvalidArgument, "bounding box exceeds layer bounds");
    }
    if (layer.support && !layer.support->same_shape(src.width(), src.height(), 1)) {
      throw Error(ErrorCode::ShapeMismatch, "support mask does not match its layer");
    }
    const int ch = src.channels();
    ImageF patch(patch_size, patch_size, ch, 0.0);

    for (int j = 0; j < patch_size; ++j) {
      for (int i = 0; i < patch_size; ++i) {
        const Vec2 o = tf.to_original({i + 0.5, j + 0.5});
        if (o.x() < bbox.x0 || o.x() >= bbox.x1 || o.y() < bbox.y0 || o.y() >= bbox.y1) continue;
        const int nx = std::clamp(static_cast<int>(std::floor(o.x())), bbox.x0, bbox.x1 - 1);
        const int ny = std::clamp(static_cast<int>(std::floor(o.y())), bbox.y0, bbox.y1 - 1);

        bool nearest = layer.interpolation == Interpolation::Nearest;
        int tx[2] = {0, 0}, ty[2] = {0, 0};
        double fx = 0.0, fy = 0.0;
        if (!nearest) {
          const double sx = o.x() - 0.5, sy = o.y() - 0.5;
          const double bx = std::floor(sx), by = std::floor(sy);
          fx = sx - bx;
          fy = sy - by;
          tx[0] = std::clamp(static_cast<int>(bx), bbox.x0, bbox.x1 - 1);
          tx[1] = std::clamp(static_cast<int>(bx) + 1, bbox.x0, bbox.x1 - 1);
          ty[0] = std::clamp(static_cast<int>(by), bbox.y0, bbox.y1 - 1);
          ty[1] = std::clamp(static_cast<int>(by) + 1, bbox.y0, bbox.y1 - 1);
          if (layer.support) {
            const ImageU8& s = *layer.support;
            nearest = !(s(tx[0], ty[0]) && s(tx[1], ty[0]) && s(tx[0], ty[1]) && s(tx[1], ty[1]));
          }
        }
        for (int c = 0; c < ch; ++c) {
          if (nearest) {
            patch(i, j, c) = src(nx, ny, c);
          } else {
            const double top = (1.0 - fx) * src(tx[0], ty[0], c) + fx * src(tx[1], ty[0], c);
            const double bot = (1.0 - fx) * src(tx[0], ty[1], c) + fx * src(tx[1], ty[1], c);
            patch(i, j, c) = (1.0 - fy) * top + fy * bot;
          }
        }
      }
    }
    result.patches.push_back(std::move(patch));
  }
  return result;
}

}  // namespace sccn
