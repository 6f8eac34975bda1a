#include <gtest/gtest.h>

#include "sccn/renderer.hpp"
#include "sccn/sparse_select.hpp"

namespace sccn {
namespace {

int count_ones(const ImageU8& m) {
  int n = 0;
  for (auto v : m.data()) n += v != 0;
  return n;
}

TEST(SamplingMask, Densities) {
  EXPECT_EQ(count_ones(sampling_mask(8, 8, SamplingRate::Quarter)), 16);
  EXPECT_EQ(count_ones(sampling_mask(9, 9, SamplingRate::Ninth)), 9);
  EXPECT_EQ(count_ones(sampling_mask(16, 16, SamplingRate::Eighth)), 32);
  EXPECT_EQ(count_ones(sampling_mask(6, 10, SamplingRate::Full)), 60);
  for (auto rate : {SamplingRate::Full, SamplingRate::Half, SamplingRate::Quarter, SamplingRate::Eighth,
                    SamplingRate::Ninth}) {
    const ImageU8 m = sampling_mask(72, 72, rate);
    EXPECT_DOUBLE_EQ(count_ones(m) / (72.0 * 72.0), density(rate));
    EXPECT_EQ(parse_sampling_rate(to_string(rate)), rate);
  }
  EXPECT_THROW(parse_sampling_rate("1/3"), Error);
}

TEST(SamplingMask, HalfIsCheckerboard) {
  const ImageU8 m = sampling_mask(31, 29, SamplingRate::Half);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y)) continue;
      if (x + 1 < m.width()) EXPECT_FALSE(m(x + 1, y));
      if (y + 1 < m.height()) EXPECT_FALSE(m(x, y + 1));
    }
  }
}

struct PatchFixture {
  ColorCodeSpec spec = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic,
                                           Aabb{{-0.05, -0.05, -0.05}, {0.05, 0.05, 0.05}}, 0, 0.0);
  ImageF colorcode{128, 128, 3, 0.0};
  ImageF symmetry{128, 128, 3, 0.0};
  ContourMask contour{128, 128, 1, 0};
  CropTransform transform = make_crop_transform({0, 0, 128, 128});

  PatchFixture() {
    for (int y = 0; y < 128; ++y)
      for (int x = 0; x < 128; ++x) {
        colorcode(x, y, 0) = x / 127.0;
        colorcode(x, y, 1) = y / 127.0;
        colorcode(x, y, 2) = 0.5;
        for (int c = 0; c < 3; ++c) symmetry(x, y, c) = 1.0;
      }
  }
};

TEST(Select, BudgetStrideKeepsEveryKth) {
  PatchFixture f;
  for (int i = 0; i < 1000; ++i) f.contour(i % 128, i / 128) = 1;
  const SelectParams params{SamplingRate::Full, 400, false};
  const CorrespondenceSet out =
      select_correspondences(f.colorcode, f.symmetry, f.contour, params, f.transform, f.spec, 640, 480);
  ASSERT_EQ(out.size(), 334u);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const int idx = static_cast<int>(3 * j);
    EXPECT_EQ(out[j].patch_x, idx % 128);
    EXPECT_EQ(out[j].patch_y, idx / 128);
    EXPECT_DOUBLE_EQ(out[j].pixel.x(), idx % 128 + 0.5);
  }
}

TEST(Select, OutputNeverExceedsBudget) {
  PatchFixture f;
  Rng rng(1);
  for (auto& v : f.contour.data()) v = uniform_unit(rng) < 0.5;
  for (std::size_t budget : {6u, 7u, 50u, 333u, 1000u, 100000u}) {
    const SelectParams params{SamplingRate::Half, budget, false};
    const auto out = select_correspondences(f.colorcode, f.symmetry, f.contour, params, f.transform, f.spec, 640, 480);
    EXPECT_LE(out.size(), budget);
    EXPECT_GE(out.size(), kMinCorrespondences);
  }
}

TEST(Select, EmptyContourIsInsufficient) {
  PatchFixture f;
  try {
    select_correspondences(f.colorcode, f.symmetry, f.contour, {}, f.transform, f.spec, 640, 480);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientPoints);
  }
}

TEST(Select, NegativeLabelMirrorsAcrossPlane) {
  PatchFixture f;
  for (int x = 0; x < 8; ++x) f.contour(x * 2, 4) = 1;
  const SelectParams params{SamplingRate::Full, 400, false};
  const auto pos = select_correspondences(f.colorcode, f.symmetry, f.contour, params, f.transform, f.spec, 640, 480);
  for (int x = 0; x < 8; ++x) f.symmetry(x * 2, 4, 0) = -1.0;
  const auto neg = select_correspondences(f.colorcode, f.symmetry, f.contour, params, f.transform, f.spec, 640, 480);
  ASSERT_EQ(pos.size(), neg.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    EXPECT_NEAR(neg[i].model_point.x(), -pos[i].model_point.x(), 1e-15);
    EXPECT_EQ(neg[i].model_point.y(), pos[i].model_point.y());
    EXPECT_TRUE(neg[i].mirrored);
  }
  const auto flipped = select_correspondences(f.colorcode, f.symmetry, f.contour,
                                              {SamplingRate::Full, 400, true}, f.transform, f.spec, 640, 480);
  for (std::size_t i = 0; i < pos.size(); ++i) EXPECT_EQ(flipped[i].model_point, pos[i].model_point);
}

TEST(Select, OracleRenderReprojectsThroughGroundTruth) {
  const CameraIntrinsics cam{300, 300, 64, 64, 128, 128};
  const TriangleMesh house = make_house_mesh();
  const auto spec = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic, house.aabb, 0);
  Rng rng(17);
  for (int k = 0; k < 5; ++k) {
    const Pose pose(random_rotation(rng), {0.0, 0.0, 0.45});
    const RenderOutput r = render(house, pose, cam, spec);
    ImageF symm(128, 128, 3);
    for (std::size_t i = 0; i < symm.data().size(); ++i) symm.data()[i] = r.symmetry_mask.data()[i];
    ContourMask all(128, 128, 1, 1);
    const auto corr = select_correspondences(r.colorcode, symm, all, {SamplingRate::Full, 1u << 20, false},
                                             make_crop_transform({0, 0, 128, 128}), spec, 128, 128);
    EXPECT_EQ(corr.size(), r.foreground_count());
    for (const auto& c : corr) {
      EXPECT_LT((project_point(cam, transform_point(pose, c.model_point)) - c.pixel).norm(), 1.0);
      const Vec3 rgb = encode_point(c.model_point, spec);
      for (int ch = 0; ch < 3; ++ch) EXPECT_NEAR(rgb[ch], r.colorcode(c.patch_x, c.patch_y, ch), 1e-9);
      EXPECT_GE(c.pixel.x(), 0.0);
      EXPECT_LT(c.pixel.x(), 128.0);
    }
  }
}

}  // namespace
}  // namespace sccn
