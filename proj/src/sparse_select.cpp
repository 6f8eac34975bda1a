#include "sccn/sparse_select.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sccn/errors.hpp"

namespace sccn {

SamplingRate parse_sampling_rate(std::string_view text) {
  if (text == "1") return SamplingRate::Full;
  if (text == "1/2") return SamplingRate::Half;
  if (text == "1/4") return SamplingRate::Quarter;
  if (text == "1/8") return SamplingRate::Eighth;
  if (text == "1/9") return SamplingRate::Ninth;
  throw Error(ErrorCode::InvalidArgument, "unknown sampling rate '" + std::string(text) + "'");
}

std::string_view to_string(SamplingRate rate) noexcept {
  switch (rate) {
    case SamplingRate::Full: return "1";
    case SamplingRate::Half: return "1/2";
    case SamplingRate::Quarter: return "1/4";
    case SamplingRate::Eighth: return "1/8";
    case SamplingRate::Ninth: return "1/9";
  }
  return "?";
}

double density(SamplingRate rate) noexcept {
  switch (rate) {
    case SamplingRate::Full: return 1.0;
    case SamplingRate::Half: return 1.0 / 2.0;
    case SamplingRate::Quarter: return 1.0 / 4.0;
    case SamplingRate::Eighth: return 1.0 / 8.0;
    case SamplingRate::Ninth: return 1.0 / 9.0;
  }
  return 0.0;
}

ImageU8 sampling_mask(int height, int width, SamplingRate rate) {
  ImageU8 mask(width, height, 1, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      bool on = false;
      switch (rate) {
        case SamplingRate::Full: on = true; break;
        case SamplingRate::Half: on = (x + y) % 2 == 0; break;
        case SamplingRate::Quarter: on = x % 2 == 0 && y % 2 == 0; break;
        case SamplingRate::Eighth: on = x % 2 == 0 && y % 2 == 0 && (x / 2 + y / 2) % 2 == 0; break;
        case SamplingRate::Ninth: on = x % 3 == 0 && y % 3 == 0; break;
      }
      mask(x, y) = on ? 1 : 0;
    }
  }
  return mask;
}

CorrespondenceSet select_correspondences(const ImageF& colorcode, const ImageF& symmetry,
                                         const ContourMask& contour, const SelectParams& params,
                                         const CropTransform& transform, const ColorCodeSpec& spec,
                                         int image_width, int image_height) {
  const int w = colorcode.width(), h = colorcode.height();
  if (colorcode.channels() != 3 || !symmetry.same_shape(w, h, 3) || !contour.same_shape(w, h, 1)) {
    throw Error(ErrorCode::ShapeMismatch, "patch layers are not aligned");
  }
  if (params.budget == 0) throw Error(ErrorCode::InvalidArgument, "point budget must be positive");

  const ImageU8 sampling = sampling_mask(h, w, params.rate);
  const std::int8_t sign = params.flip_symmetry ? -1 : 1;

  CorrespondenceSet candidates;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!contour(x, y) || !sampling(x, y)) continue;
      SymmetryTriplet labels{};
      for (int c = 0; c < 3; ++c) {
        const double s = symmetry(x, y, c);
        labels[c] = static_cast<std::int8_t>(s > 0.0 ? sign : (s < 0.0 ? -sign : 0));
      }
      if (labels[0] == 0 || labels[1] == 0 || labels[2] == 0) continue;

      const Vec2 pixel = transform.to_original({x + 0.5, y + 0.5});
      if (pixel.x() < 0.0 || pixel.y() < 0.0 || pixel.x() >= image_width ||
          pixel.y() >= image_height) {
        continue;
      }
      const Vec3 rgb(std::clamp(colorcode(x, y, 0), 0.0, 1.0), std::clamp(colorcode(x, y, 1), 0.0, 1.0),
                     std::clamp(colorcode(x, y, 2), 0.0, 1.0));
      Correspondence corr;
      corr.pixel = pixel;
      corr.model_point = decode_pixel(rgb, labels, spec);
      corr.patch_x = x;
      corr.patch_y = y;
      corr.mirrored = spec.symmetric() && labels[*spec.symmetry_axis] < 0;
      candidates.push_back(corr);
    }
  }

  if (candidates.size() > params.budget) {
    const std::size_t stride = (candidates.size() + params.budget - 1) / params.budget;
    CorrespondenceSet kept;
    kept.reserve(params.budget);
    for (std::size_t i = 0; i < candidates.size(); i += stride) kept.push_back(candidates[i]);
    candidates = std::move(kept);
  }
  if (candidates.size() < kMinCorrespondences) {
    throw Error(ErrorCode::InsufficientPoints,
                std::to_string(candidates.size()) + " candidates survive, need 6");
  }
  return candidates;
}

}  // namespace sccn
