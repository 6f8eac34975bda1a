#include <gtest/gtest.h>

#include <cmath>

#include "sccn/metrics.hpp"

namespace sccn {
namespace {

std::vector<Vec3> symmetric_cloud(Rng& rng, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    const Vec3 p(0.05 * uniform_unit(rng), 0.1 * (uniform_unit(rng) - 0.5), 0.06 * (uniform_unit(rng) - 0.5));
    pts.push_back(p);
    pts.emplace_back(-p.x(), p.y(), p.z());
  }
  return pts;
}

Pose random_pose(Rng& rng) {
  return Pose(random_rotation(rng), Vec3(uniform_unit(rng), uniform_unit(rng), 0.5 + uniform_unit(rng)));
}

double brute_add(const Placement& gt, const Placement& est, const std::vector<Vec3>& pts) {
  double s = 0.0;
  for (const Vec3& p : pts) s += (gt.apply(p) - est.apply(p)).norm();
  return s / static_cast<double>(pts.size());
}

TEST(Add, IdentityAndOffset) {
  Rng rng(1);
  const auto pts = symmetric_cloud(rng, 50);
  const Pose gt = random_pose(rng);
  const std::optional<ReflectionPlane> plane = ReflectionPlane{0, 0.0};
  for (auto mode : {AddMode::Add, AddMode::AddS, AddMode::AddSPrime}) {
    EXPECT_NEAR(add_metric(gt, gt, pts, mode, plane), 0.0, 1e-15);
  }
  const Pose shifted(gt.rotation(), gt.translation() + Vec3(0.01, 0, 0));
  EXPECT_NEAR(add_metric(gt, shifted, pts, AddMode::Add), 0.01, 1e-12);
}

TEST(Add, ReflectedEstimateOnSymmetricCloud) {
  Rng rng(2);
  const auto pts = symmetric_cloud(rng, 100);
  const ReflectionPlane plane{0, 0.0};
  const Pose gt = random_pose(rng);
  const Placement est = reflect_placement(gt, plane);
  EXPECT_GT(add_metric(gt, est, pts, AddMode::Add), 0.01);
  EXPECT_NEAR(add_metric(gt, est, pts, AddMode::AddSPrime, plane), 0.0, 1e-12);
}

TEST(Add, PrimeEqualsBruteForceMinimum) {
  Rng rng(3);
  const auto pts = symmetric_cloud(rng, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const ReflectionPlane plane{static_cast<int>(uniform_index(rng, 3)), 0.02 * (uniform_unit(rng) - 0.5)};
    const Pose gt = random_pose(rng);
    const Placement est = trial % 2 ? Placement(random_pose(rng)) : reflect_placement(random_pose(rng), plane);
    const double direct = add_metric(gt, est, pts, AddMode::Add);
    const double mirrored = add_metric(gt, reflect_placement(est, plane), pts, AddMode::Add);
    EXPECT_EQ(add_metric(gt, est, pts, AddMode::AddSPrime, plane), std::min(direct, mirrored));
    EXPECT_NEAR(direct, brute_add(gt, est, pts), 1e-12);
  }
}

TEST(Add, OrderingAndLeftInvariance) {
  Rng rng(4);
  const auto pts = symmetric_cloud(rng, 30);
  const std::optional<ReflectionPlane> plane = ReflectionPlane{0, 0.0};
  for (int trial = 0; trial < 100; ++trial) {
    const Pose gt = random_pose(rng), est = random_pose(rng), common = random_pose(rng);
    const double add = add_metric(gt, est, pts, AddMode::Add);
    EXPECT_LE(add_metric(gt, est, pts, AddMode::AddS), add + 1e-15);
    EXPECT_LE(add_metric(gt, est, pts, AddMode::AddSPrime, plane), add);
    EXPECT_NEAR(add_metric(common.compose(gt), common.compose(est), pts, AddMode::Add), add, 1e-12);
  }
}

TEST(Add, Errors) {
  const Pose p = Pose::identity();
  try {
    add_metric(p, p, std::vector<Vec3>{}, AddMode::Add);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPointSet);
  }
  const std::vector<Vec3> one{Vec3::Zero()};
  try {
    add_metric(p, p, one, AddMode::AddSPrime);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingReflection);
  }
  EXPECT_EQ(parse_add_mode("ADD-S-PRIME"), AddMode::AddSPrime);
  EXPECT_THROW(parse_add_mode("ADD-T"), Error);
}

TEST(Threshold, StrictTenPercent) {
  EXPECT_TRUE(passes_threshold(0.09, 1.0));
  EXPECT_FALSE(passes_threshold(0.11, 1.0));
  EXPECT_FALSE(passes_threshold(0.1, 1.0));
  const std::vector<double> scores{0.09, 0.11, 0.1, 0.0};
  EXPECT_DOUBLE_EQ(accuracy_at_threshold(scores, 1.0), 0.5);
}

TEST(Evaluate, RecordFieldsConsistent) {
  Rng rng(5);
  const auto pts = symmetric_cloud(rng, 30);
  const Pose gt = random_pose(rng);
  const EvalRecord plain = evaluate_pose(gt, gt, pts, 0.1);
  EXPECT_FALSE(plain.add_s_prime.has_value());
  EXPECT_TRUE(plain.pass_add);
  const EvalRecord sym = evaluate_pose(gt, reflect_placement(gt, {0, 0.0}), pts, 0.1, ReflectionPlane{0, 0.0});
  ASSERT_TRUE(sym.add_s_prime.has_value());
  EXPECT_LE(sym.add_s, sym.add);
  EXPECT_TRUE(*sym.pass_add_s_prime);
}

TEST(EvalPoints, CappedByStride) {
  std::vector<Vec3> v;
  for (int i = 0; i < 2500; ++i) v.emplace_back(i, 0, 0);
  const auto s = sample_eval_points(v, 1000);
  EXPECT_LE(s.size(), 1000u);
  EXPECT_GE(s.size(), 800u);
  EXPECT_EQ(sample_eval_points(std::span<const Vec3>(v.data(), 10), 1000).size(), 10u);
}

}  // namespace
}  // namespace sccn
