#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "sccn/colorcode.hpp"

namespace sccn {
namespace {

Aabb box(Vec3 lo, Vec3 hi) { return Aabb{lo, hi}; }

TEST(Encode, StandardUsesLongestExtent) {
  const auto unit = ColorCodeSpec::make(ColorCodeMode::Standard, box(Vec3::Zero(), Vec3::Ones()));
  EXPECT_TRUE(encode_point(Vec3::Zero(), unit).isZero());
  const auto spec = ColorCodeSpec::make(ColorCodeMode::Standard, box(Vec3::Zero(), {0.4, 0.2, 0.1}));
  const Vec3 c = encode_point({0.4, 0.2, 0.1}, spec);
  EXPECT_NEAR(c.x(), 1.0, 1e-15);
  EXPECT_NEAR(c.y(), 0.5, 1e-15);
  EXPECT_NEAR(c.z(), 0.25, 1e-15);
}

TEST(Encode, AnisotropicSpansFullRangePerAxis) {
  const auto spec = ColorCodeSpec::make(ColorCodeMode::Anisotropic, box(Vec3::Zero(), {0.4, 0.2, 0.1}));
  EXPECT_TRUE(encode_point({0.4, 0.2, 0.1}, spec).isApprox(Vec3::Ones()));
  EXPECT_TRUE(encode_point({0.2, 0.05, 0.1}, spec).isApprox(Vec3(0.5, 0.25, 1.0)));
}

TEST(Encode, SymmetricHalvesShareColour) {
  const auto spec = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic,
                                        box({-0.2, -0.1, -0.1}, {0.2, 0.1, 0.1}), 0, 0.0);
  EXPECT_NEAR(encode_point({0.1, 0, 0}, spec).x(), 0.5, 1e-15);
  EXPECT_NEAR(encode_point({-0.1, 0, 0}, spec).x(), 0.5, 1e-15);
}

TEST(Encode, OutOfBoundsRejected) {
  const auto spec = ColorCodeSpec::make(ColorCodeMode::Anisotropic, box(Vec3::Zero(), Vec3::Ones()));
  try {
    encode_point({1.1, 0.5, 0.5}, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfBounds);
  }
  EXPECT_NO_THROW(encode_point({1.0 + 1e-12, 0.5, 0.5}, spec));
}

TEST(Spec, Validation) {
  EXPECT_THROW(ColorCodeSpec::make(ColorCodeMode::Anisotropic, box(Vec3::Zero(), {1, 0, 1})), Error);
  EXPECT_THROW(ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic, box(Vec3::Zero(), Vec3::Ones())), Error);
  EXPECT_THROW(ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic, box(Vec3::Zero(), Vec3::Ones()), 0, 2.0),
               Error);
  EXPECT_THROW(ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic, box(Vec3::Zero(), Vec3::Ones()), 3), Error);
  const auto mid = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic, box({0, 0, 0}, {2, 1, 1}), 0);
  EXPECT_DOUBLE_EQ(mid.plane_offset, 1.0);
}

TEST(Symmetry, LabelsBySide) {
  const auto spec = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic,
                                        box({-0.1, -0.1, -0.1}, {0.1, 0.1, 0.1}), 0, 0.0);
  EXPECT_EQ(symmetry_value({0.05, 0, 0}, spec), (SymmetryTriplet{1, 1, 1}));
  EXPECT_EQ(symmetry_value({-0.05, 0, 0}, spec), (SymmetryTriplet{-1, 1, 1}));
  EXPECT_EQ(symmetry_value({0.0, 0, 0}, spec), (SymmetryTriplet{1, 1, 1}));
  const auto plain = ColorCodeSpec::make(ColorCodeMode::Anisotropic, box({-0.1, -0.1, -0.1}, {0.1, 0.1, 0.1}));
  EXPECT_EQ(symmetry_value({-0.05, 0, 0}, plain), kForegroundTriplet);
}

TEST(Decode, RestoresSignOnSymmetricAxis) {
  const auto spec = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic,
                                        box({-0.2, -0.1, -0.1}, {0.2, 0.1, 0.1}), 0, 0.0);
  const Vec3 p = decode_pixel({0.5, 0.5, 0.5}, {-1, 1, 1}, spec);
  EXPECT_NEAR(p.x(), -0.1, 1e-15);
  try {
    decode_pixel({0.5, 0.5, 0.5}, kBackgroundTriplet, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BackgroundPixel);
  }
}

TEST(Decode, OffCentrePlaneUsesLongerHalf) {
  // Plane at x = 0.1 in [-0.2, 0.2]: the longer half is 0.3.
  const auto spec = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic,
                                        box({-0.2, -0.1, -0.1}, {0.2, 0.1, 0.1}), 0, 0.1);
  EXPECT_NEAR(encode_point({-0.2, 0, 0}, spec).x(), 1.0, 1e-15);
  EXPECT_NEAR(encode_point({0.2, 0, 0}, spec).x(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(decode_pixel({1.0 / 3.0, 0.5, 0.5}, {1, 1, 1}, spec).x(), 0.2, 1e-15);
}

TEST(Quantize, RoundHalfUp) {
  EXPECT_EQ(quantize(1.0), 255);
  EXPECT_DOUBLE_EQ(dequantize(quantize(1.0)), 1.0);
  EXPECT_EQ(quantize(0.5), 128);
  EXPECT_NEAR(dequantize(quantize(0.5)), 0.50196, 1e-5);
  EXPECT_EQ(quantize(0.0), 0);
  EXPECT_EQ(quantize(-0.3), 0);
  EXPECT_EQ(quantize(1.7), 255);
}

class RoundTrip : public ::testing::TestWithParam<ColorCodeMode> {};

TEST_P(RoundTrip, BijectiveAndQuantizationBounded) {
  const Aabb bounds = box({-0.07, -0.03, 0.01}, {0.05, 0.09, 0.04});
  const auto spec = ColorCodeSpec::make(GetParam(), bounds, 1, 0.02);
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 u(uniform_unit(rng), uniform_unit(rng), uniform_unit(rng));
    const Vec3 p = bounds.min + u.cwiseProduct(bounds.extent());
    const Vec3 c = encode_point(p, spec);
    const SymmetryTriplet s = symmetry_value(p, spec);
    EXPECT_LT((decode_pixel(c, s, spec) - p).cwiseAbs().maxCoeff(), 1e-12);

    Vec3 cq;
    for (int k = 0; k < 3; ++k) cq[k] = dequantize(quantize(c[k]));
    const Vec3 q = decode_pixel(cq, s, spec);
    for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(q[k] - p[k]), spec.axis_scale(k) / 510.0 + 1e-15);
  }
}

TEST(Encode, MirrorPairsShareColourAndDifferInLabel) {
  const Aabb bounds = box({-0.05, -0.03, -0.02}, {0.05, 0.09, 0.04});
  const auto spec = ColorCodeSpec::make(ColorCodeMode::SymmetricAnisotropic, bounds, 0, 0.0);
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const Vec3 p = bounds.min + Vec3(uniform_unit(rng), uniform_unit(rng), uniform_unit(rng)).cwiseProduct(bounds.extent());
    const Vec3 m = spec.reflection_plane().mirror(p);
    EXPECT_EQ(encode_point(p, spec), encode_point(m, spec));
    if (p.x() != 0.0) EXPECT_NE(symmetry_value(p, spec), symmetry_value(m, spec));
  }
}

INSTANTIATE_TEST_SUITE_P(Modes, RoundTrip,
                         ::testing::Values(ColorCodeMode::Standard, ColorCodeMode::Anisotropic,
                                           ColorCodeMode::SymmetricAnisotropic),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Encode, AnisotropicFacesReachChannelExtremes) {
  const Aabb bounds = box({-0.05, -0.03, -0.02}, {0.05, 0.09, 0.04});
  const auto spec = ColorCodeSpec::make(ColorCodeMode::Anisotropic, bounds);
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 lo = bounds.center(), hi = bounds.center();
    lo[axis] = bounds.min[axis];
    hi[axis] = bounds.max[axis];
    EXPECT_NEAR(encode_point(lo, spec)[axis], 0.0, 1e-15);
    EXPECT_NEAR(encode_point(hi, spec)[axis], 1.0, 1e-15);
  }
}

TEST(Mode, ParseAndName) {
  for (auto m : {ColorCodeMode::Standard, ColorCodeMode::Anisotropic, ColorCodeMode::SymmetricAnisotropic}) {
    EXPECT_EQ(parse_colorcode_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_colorcode_mode("isotropic"), Error);
}

}  // namespace
}  // namespace sccn
