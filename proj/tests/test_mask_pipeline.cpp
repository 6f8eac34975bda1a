#include <gtest/gtest.h>

#include <cmath>

#include "sccn/mask_pipeline.hpp"

namespace sccn {
namespace {

ImageF constant(int w, int h, int ch, double v) { return ImageF(w, h, ch, v); }

ImageF vertical_step(int w, int h, int k) {
  ImageF img(w, h, 1, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = k; x < w; ++x) img(x, y) = 1.0;
  return img;
}

// Reference magnitude for a step along x, derived by hand: the 3x3
// derivative (-1,0,1) with smoothing weights summing to 4 and the 5x5
// derivative (-1,-2,0,2,1) with weights summing to 16 give, at column
// offsets from the step:
//   3x3: 4/4 at k-1 and k, 0 elsewhere
//   5x5: (1+2)*16/48 = 1 at k-1 and k, 1*16/48 = 1/3 at k-2 and k+1
// magnitude = 0.5 * sqrt(g3^2 + g5^2).
double step_reference(int x, int k) {
  double g3 = (x == k - 1 || x == k) ? 1.0 : 0.0;
  double g5 = (x == k - 1 || x == k) ? 1.0 : ((x == k - 2 || x == k + 1) ? 1.0 / 3.0 : 0.0);
  return 0.5 * std::sqrt(g3 * g3 + g5 * g5);
}

TEST(Sobel, ConstantImageHasNoContour) {
  const ContourMask m = sobel_contour(constant(16, 12, 3, 0.37), 1e-9);
  for (auto v : m.data()) EXPECT_EQ(v, 0);
}

TEST(Sobel, StepEdgeMatchesHandConvolution) {
  const int k = 10;
  const ImageF mag = sobel_magnitude(vertical_step(24, 9, k));
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 24; ++x) EXPECT_NEAR(mag(x, y), step_reference(x, k), 1e-12) << x;
  }
  const ContourMask m = sobel_contour(vertical_step(24, 9, k), 0.1);
  for (int x = 0; x < 24; ++x) EXPECT_EQ(m(x, 4), (x >= k - 2 && x <= k + 1) ? 1 : 0);
  const ContourMask tight = sobel_contour(vertical_step(24, 9, k), 0.5);
  for (int x = 0; x < 24; ++x) EXPECT_EQ(tight(x, 4), (x == k - 1 || x == k) ? 1 : 0);
}

TEST(Sobel, ZeroThresholdMarksAnyGradient) {
  const ImageF img = vertical_step(24, 9, 10);
  const ImageF mag = sobel_magnitude(img);
  const ContourMask m = sobel_contour(img, 0.0);
  for (std::size_t i = 0; i < m.data().size(); ++i) EXPECT_EQ(m.data()[i] != 0, mag.data()[i] > 0.0);
  EXPECT_THROW(sobel_contour(img, 1.0), Error);
}

TEST(Sobel, ColourInputUsesLuma) {
  ImageF rgb(20, 6, 3, 0.0);
  for (int y = 0; y < 6; ++y)
    for (int x = 8; x < 20; ++x) rgb(x, y, 1) = 1.0;  // green step: luma 0.587
  const ImageF mag = sobel_magnitude([&] {
    ImageF l(20, 6, 1, 0.0);
    for (int y = 0; y < 6; ++y)
      for (int x = 8; x < 20; ++x) l(x, y) = 0.587;
    return l;
  }());
  const ContourMask m = sobel_contour(rgb, 0.2);
  for (int x = 0; x < 20; ++x) EXPECT_EQ(m(x, 3), mag(x, 3) > 0.2 ? 1 : 0);
}

TEST(Sobel, HorizontalFlipEquivariance) {
  Rng rng(2);
  ImageF img(23, 17, 3);
  for (double& v : img.data()) v = uniform_unit(rng);
  ImageF flipped(23, 17, 3);
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 23; ++x)
      for (int c = 0; c < 3; ++c) flipped(22 - x, y, c) = img(x, y, c);
  const ImageF a = sobel_magnitude(img), b = sobel_magnitude(flipped);
  for (int y = 0; y < 17; ++y)
    for (int x = 0; x < 23; ++x) EXPECT_NEAR(a(x, y), b(22 - x, y), 1e-12);
}

TEST(MaxPool, BlockMaximum) {
  ImageF single(8, 8, 1, 0.0);
  single(3, 5) = 1.0;
  const ImageF p = max_pool(single, 8);
  ASSERT_EQ(p.width(), 1);
  EXPECT_EQ(p(0, 0), 1.0);

  const ImageF zero = max_pool(ImageF(16, 16, 1, 0.0), 8);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);

  ImageF corner(16, 16, 1, 0.0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) corner(x, y) = 1.0;
  const ImageF q = max_pool(corner, 8);
  EXPECT_EQ(q(0, 0), 1.0);
  EXPECT_EQ(q(1, 0), 0.0);
  EXPECT_EQ(q(0, 1), 0.0);
  EXPECT_EQ(q(1, 1), 0.0);

  const ImageF ragged = max_pool(ImageF(17, 9, 1, 0.2), 8);
  EXPECT_EQ(ragged.width(), 3);
  EXPECT_EQ(ragged.height(), 2);
}

// Independent reference of the region-growing sequence on a pooled grid.
std::vector<int> reference_grow(const std::vector<double>& pooled, int w, int h, double lo, double mid, double hi) {
  auto thresh = [&](double t) {
    std::vector<int> m(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) m[i] = pooled[i] >= t;
    return m;
  };
  auto dilate = [&](const std::vector<int>& m) {
    std::vector<int> out(m.size(), 0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx >= 0 && yy >= 0 && xx < w && yy < h && m[yy * w + xx]) out[y * w + x] = 1;
          }
    return out;
  };
  auto meet = [](std::vector<int> a, const std::vector<int>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] && b[i];
    return a;
  };
  return dilate(meet(dilate(meet(dilate(thresh(hi)), thresh(mid))), thresh(lo)));
}

// 160x160 map: core 0.95 block at cells (8..11), a 0.75 collar one cell wide,
// a 0.6 ring one cell beyond that, and an isolated 0.6 blob far away.
ProbabilityMap blob_scene() {
  ProbabilityMap prob(160, 160, 1, 0.1);
  auto fill_cells = [&](int cx0, int cy0, int cx1, int cy1, double v) {
    for (int y = cy0 * 8; y < cy1 * 8; ++y)
      for (int x = cx0 * 8; x < cx1 * 8; ++x) prob(x, y) = v;
  };
  fill_cells(6, 6, 14, 14, 0.6);
  fill_cells(7, 7, 13, 13, 0.75);
  fill_cells(8, 8, 12, 12, 0.95);
  fill_cells(16, 1, 18, 3, 0.6);
  return prob;
}

TEST(GrowMask, ExcludesIsolatedBlobIncludesRing) {
  const ProbabilityMap prob = blob_scene();
  const GrowMaskResult r = grow_mask(prob);
  const ImageF pooled = max_pool(prob, 8);
  const auto ref = reference_grow({pooled.data().begin(), pooled.data().end()}, 20, 20, 0.5, 0.7, 0.9);
  ASSERT_EQ(r.coarse_mask.width(), 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) EXPECT_EQ(r.coarse_mask(x, y) != 0, ref[y * 20 + x] != 0) << x << "," << y;
  EXPECT_TRUE(r.coarse_mask(6, 6));
  EXPECT_TRUE(r.coarse_mask(13, 13));
  EXPECT_FALSE(r.coarse_mask(16, 1));
  EXPECT_FALSE(r.coarse_mask(17, 2));
  // Grown region spans cells 5..14; one more cell of margin, times 8.
  EXPECT_EQ(r.bbox, (BoundingBox{32, 32, 128, 128}));
}

TEST(GrowMask, SaturatedAndEmptyMaps) {
  const GrowMaskResult full = grow_mask(ProbabilityMap(64, 48, 1, 0.95));
  for (auto v : full.coarse_mask.data()) EXPECT_EQ(v, 1);
  EXPECT_EQ(full.bbox, (BoundingBox{0, 0, 64, 48}));
  try {
    grow_mask(ProbabilityMap(64, 48, 1, 0.4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoDetection);
  }
}

TEST(GrowMask, MonotoneAndContainedProperty) {
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    ProbabilityMap prob(96, 80, 1);
    for (double& v : prob.data()) v = uniform_unit(rng) < 0.9 ? 0.3 * uniform_unit(rng) : uniform_unit(rng);
    prob(40, 40) = 0.95;
    ProbabilityMap raised = prob;
    for (double& v : raised.data()) v = std::min(1.0, v + 0.2 * uniform_unit(rng));

    const GrowMaskResult a = grow_mask(prob), b = grow_mask(raised);
    const ImageF pooled = max_pool(prob, 8);
    const ImageU8 dil_low = dilate8([&] {
      ImageU8 m(pooled.width(), pooled.height(), 1);
      for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = pooled.data()[i] >= 0.5;
      return m;
    }());
    for (std::size_t i = 0; i < a.coarse_mask.data().size(); ++i) {
      if (a.coarse_mask.data()[i]) EXPECT_TRUE(b.coarse_mask.data()[i]);
      if (pooled.data()[i] >= 0.9) EXPECT_TRUE(a.coarse_mask.data()[i]);
      if (a.coarse_mask.data()[i]) EXPECT_TRUE(dil_low.data()[i]);
    }
  }
}

TEST(Crop, SquareBoxIsIdentity) {
  const CropTransform t = make_crop_transform({10, 20, 138, 148});
  EXPECT_DOUBLE_EQ(t.scale, 1.0);
  EXPECT_DOUBLE_EQ(t.pad_left, 0.0);
  EXPECT_DOUBLE_EQ(t.pad_top, 0.0);
  ImageF img(200, 200, 1);
  for (int y = 0; y < 200; ++y)
    for (int x = 0; x < 200; ++x) img(x, y) = x + 1000.0 * y;
  const CropResult r = crop_pad_resize({{&img, Interpolation::Bilinear, nullptr}}, {10, 20, 138, 148});
  for (int j = 0; j < 128; j += 9)
    for (int i = 0; i < 128; i += 7) EXPECT_NEAR(r.patches[0](i, j), img(i + 10, j + 20), 1e-9);
}

TEST(Crop, WideBoxScalesAndPads) {
  const BoundingBox box{100, 50, 164, 82};
  const CropTransform t = make_crop_transform(box);
  EXPECT_DOUBLE_EQ(t.scale, 2.0);
  EXPECT_DOUBLE_EQ(t.pad_left, 0.0);
  EXPECT_DOUBLE_EQ(t.pad_top, 32.0);
  const Vec2 o = t.to_original({0.0, 32.0});
  EXPECT_DOUBLE_EQ(o.x(), 100.0);
  EXPECT_DOUBLE_EQ(o.y(), 50.0);

  ImageF img(200, 100, 1, 1.0);
  const CropResult r = crop_pad_resize({{&img, Interpolation::Nearest, nullptr}}, box);
  for (int j = 0; j < 128; ++j) {
    const double expected = (j >= 32 && j < 96) ? 1.0 : 0.0;
    EXPECT_EQ(r.patches[0](64, j), expected) << j;
  }
}

TEST(Crop, EmptyBoxAndRoundTrip) {
  try {
    make_crop_transform({5, 5, 5, 40});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBox);
  }
  const CropTransform t = make_crop_transform({37, 11, 120, 70});
  for (int j = 0; j < 128; j += 5) {
    for (int i = 0; i < 128; i += 3) {
      const Vec2 c(i + 0.5, j + 0.5);
      const Vec2 o = t.to_original(c);
      if (o.y() < 11 || o.y() >= 70) continue;
      EXPECT_GE(o.x(), 37.0);
      EXPECT_LT(o.x(), 120.0);
      EXPECT_LT((t.to_patch(o) - c).norm(), 0.5);
    }
  }
}

TEST(Crop, SupportMaskPreventsSilhouetteBlending) {
  ImageF img(40, 40, 1, 0.0);
  ImageU8 support(40, 40, 1, 0);
  for (int y = 0; y < 40; ++y)
    for (int x = 20; x < 40; ++x) {
      img(x, y) = 0.8;
      support(x, y) = 1;
    }
  const CropResult r = crop_pad_resize({{&img, Interpolation::Bilinear, &support}}, {0, 0, 40, 40}, 128);
  for (double v : r.patches[0].data()) EXPECT_TRUE(v == 0.0 || std::abs(v - 0.8) < 1e-12) << v;
}

}  // namespace
}  // namespace sccn
