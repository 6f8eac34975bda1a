#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "sccn/colorcode.hpp"
#include "sccn/image.hpp"
#include "sccn/mask_pipeline.hpp"

namespace sccn {

/// Periodic pixel subsampling rates.
enum class SamplingRate { Full, Half, Quarter, Eighth, Ninth };

/// "1", "1/2", "1/4", "1/8", "1/9".
SamplingRate parse_sampling_rate(std::string_view text);
std::string_view to_string(SamplingRate rate) noexcept;
double density(SamplingRate rate) noexcept;

/// Deterministic periodic masks:
///   1/2  (x + y) even
///   1/4  x even and y even
///   1/8  x even, y even and (x/2 + y/2) even
///   1/9  x and y both multiples of 3
ImageU8 sampling_mask(int height, int width, SamplingRate rate);

inline constexpr std::size_t kMinCorrespondences = 6;

struct Correspondence {
  Vec2 pixel;        // original-image continuous coordinates
  Vec3 model_point;  // model frame, metres
  int patch_x = 0;
  int patch_y = 0;
  bool mirrored = false;  // decoded on the negative side of the symmetry plane
};

using CorrespondenceSet = std::vector<Correspondence>;

struct SelectParams {
  SamplingRate rate = SamplingRate::Quarter;
  std::size_t budget = 400;
  /// Decode with every symmetry label negated. The symmetry loss is blind to
  /// a global sign, so a predicted mask may use either convention.
  bool flip_symmetry = false;
};

/// Candidates are contour & foreground & sampling-mask pixels of the aligned
/// patches, visited in row-major order. Each is decoded through the symmetry
/// labels and its pixel centre mapped back through `transform`. When the
/// candidates exceed the budget every k-th is kept, k = ceil(count/budget).
/// Throws InsufficientPoints below six survivors.
///
/// `colorcode` is W x H x 3; `symmetry` holds the labels as W x H x 3 values
/// in {-1, 0, +1}; `contour` is W x H.
CorrespondenceSet select_correspondences(const ImageF& colorcode, const ImageF& symmetry,
                                         const ContourMask& contour, const SelectParams& params,
                                         const CropTransform& transform, const ColorCodeSpec& spec,
                                         int image_width, int image_height);

}  // namespace sccn
