#pragma once

#include <array>
#include <vector>

#include "sccn/geometry.hpp"
#include "sccn/image.hpp"

namespace sccn {

/// Binary edge map; 1 marks pixels with significant gradient magnitude.
using ContourMask = ImageU8;
/// Single-channel map with values in [0, 1].
using ProbabilityMap = ImageF;

inline constexpr double kDefaultContourThreshold = 0.1;
inline constexpr int kDefaultPoolFactor = 8;
inline constexpr int kPatchSize = 128;

/// Normalised gradient magnitude in [0, 1] from four responses: the 3x3
/// Sobel pair (zero-padded to 5x5) and the 5x5 Sobel pair, each divided by
/// its maximum attainable response on [0, 1] input. Borders replicate.
ImageF sobel_magnitude(const ImageF& image);

/// sobel_magnitude(image) > threshold. Accepts 1- or 3-channel images;
/// colour input is reduced to luma 0.299 R + 0.587 G + 0.114 B first.
ContourMask sobel_contour(const ImageF& image, double threshold = kDefaultContourThreshold);

/// Block max over factor x factor cells; the input is zero-padded up to the
/// next multiple of `factor`.
ImageF max_pool(const ImageF& map, int factor = kDefaultPoolFactor);

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  bool empty() const noexcept { return width() <= 0 || height() <= 0; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct GrowMaskParams {
  std::array<double, 3> thresholds{0.5, 0.7, 0.9};  // low, mid, high
  int pool_factor = kDefaultPoolFactor;
};

struct GrowMaskResult {
  ImageU8 coarse_mask;  // pooled resolution
  BoundingBox bbox;     // original resolution, clamped to the image
};

/// 8-connected one-cell dilation.
ImageU8 dilate8(const ImageU8& mask);

/// Multi-threshold region growing on the pooled probability map: seed with
/// the high mask, dilate and intersect with the mid mask, dilate and
/// intersect with the low mask, dilate once more. The box is the tight
/// bound of the result grown by one pooled cell. Throws NoDetection when the
/// high mask is empty.
GrowMaskResult grow_mask(const ProbabilityMap& prob, const GrowMaskParams& params = {});

/// Maps between original-image and patch continuous coordinates:
/// patch = (orig - bbox origin) * scale + pad.
struct CropTransform {
  BoundingBox bbox;
  double scale = 1.0;
  double pad_left = 0.0;
  double pad_top = 0.0;
  int patch_size = kPatchSize;

  Vec2 to_patch(const Vec2& original) const;
  Vec2 to_original(const Vec2& patch) const;
};

enum class Interpolation { Nearest, Bilinear };

/// One layer to resample. For bilinear layers an optional single-channel
/// `support` mask (same size as `image`) restricts interpolation to samples
/// whose four taps are all supported; other samples fall back to nearest.
struct CropLayer {
  const ImageF* image = nullptr;
  Interpolation interpolation = Interpolation::Bilinear;
  const ImageU8* support = nullptr;
};

struct CropResult {
  std::vector<ImageF> patches;
  CropTransform transform;
};

CropTransform make_crop_transform(const BoundingBox& bbox, int patch_size = kPatchSize);

/// Crops `bbox`, scales uniformly so the longer side spans the patch and
/// centres the shorter side with zero padding. Every layer shares the same
/// transform. Throws EmptyBox for a zero-area box.
CropResult crop_pad_resize(const std::vector<CropLayer>& layers, const BoundingBox& bbox,
                           int patch_size = kPatchSize);

}  // namespace sccn
