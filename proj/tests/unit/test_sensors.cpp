#include <gtest/gtest.h>

#include <cmath>

#include "dpm/error.hpp"
#include "dpm/raster.hpp"
#include "dpm/sensors.hpp"

using namespace dpm;

namespace {

Pose some_pose() {
  const Skeleton hand = Skeleton::hand();
  MotionScript script{MotionKind::kArticulate, 20.0, 0.5, 3.0, 0};
  return sample_ground_truth(hand, script, 0.7);
}

double stddev(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST(Lmc, NoiselessObservationIsTruth) {
  SensorModels m;
  m.lmc_jitter_std_mm = 0.0;
  m.lmc_latency_s = 0.0;
  RngStream rng(3);
  const Pose gt = some_pose();
  const Pose out = lmc_observe(gt, m, rng);
  for (std::size_t j = 0; j < gt.joints.size(); ++j) {
    EXPECT_EQ(out.joints[j].translation, gt.joints[j].translation);
  }
  EXPECT_EQ(out.timestamp, gt.timestamp);
}

TEST(Lmc, BiasShiftsEveryJoint) {
  SensorModels m;
  m.lmc_jitter_std_mm = 0.0;
  m.lmc_bias_mm = SensorModels::uniform_bias(Vec3(5, 0, 0));
  RngStream rng(3);
  const Pose gt = some_pose();
  const Pose out = lmc_observe(gt, m, rng);
  for (std::size_t j = 0; j < gt.joints.size(); ++j) {
    EXPECT_NEAR((out.joints[j].translation - gt.joints[j].translation - Vec3(5, 0, 0)).norm(),
                0.0, 1e-12);
  }
}

TEST(Lmc, BiasCardinalityChecked) {
  SensorModels m;
  m.lmc_bias_mm = SensorModels::uniform_bias(Vec3(1, 0, 0), 5);
  RngStream rng(1);
  EXPECT_THROW(lmc_observe(some_pose(), m, rng), InvalidArgument);
}

TEST(Lmc, JitterStatistics) {
  SensorModels m;
  m.lmc_jitter_std_mm = 1.0;
  RngStream rng(11);
  const Pose gt = some_pose();
  std::vector<double> dx, dy, dz;
  for (int i = 0; i < 10000; ++i) {
    const Pose out = lmc_observe(gt, m, rng);
    const Vec3 d = out.joints[4].translation - gt.joints[4].translation;
    dx.push_back(d.x());
    dy.push_back(d.y());
    dz.push_back(d.z());
  }
  for (const auto* v : {&dx, &dy, &dz}) {
    const double s = stddev(*v);
    EXPECT_GE(s, 0.9);
    EXPECT_LE(s, 1.1);
  }
}

TEST(Lmc, SameSeedSameStream) {
  SensorModels m;
  m.lmc_jitter_std_mm = 0.7;
  RngStream a(42), b(42);
  const Pose gt = some_pose();
  for (int i = 0; i < 50; ++i) {
    const Pose x = lmc_observe(gt, m, a);
    const Pose y = lmc_observe(gt, m, b);
    for (std::size_t j = 0; j < x.joints.size(); ++j) {
      ASSERT_EQ(x.joints[j].translation, y.joints[j].translation);
    }
  }
}

TEST(Detector, ZeroJitterReturnsCaptureTruth) {
  SensorModels m;
  m.detector_jitter_std_px = 0.0;
  Mask mask(8, 8, 0);
  mask(3, 3) = 1;
  LandmarkSet gt;
  gt.points = {Vec2(1, 2), Vec2(3, 4), Vec2(5, 6)};
  gt.timestamp = 0.25;
  RngStream rng(1);
  const auto out = detect_landmarks(mask, gt, m, rng);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->points, gt.points);
  EXPECT_EQ(out->timestamp, 0.25);
  EXPECT_EQ(out->kind, LandmarkKind::kDetected);
}

TEST(Detector, EmptyMaskYieldsNothing) {
  SensorModels m;
  LandmarkSet gt;
  gt.points = {Vec2(1, 2)};
  RngStream rng(1);
  EXPECT_FALSE(detect_landmarks(Mask(8, 8, 0), gt, m, rng).has_value());
}

TEST(Detector, JitterStatistics) {
  SensorModels m;
  m.detector_jitter_std_px = 0.5;
  Mask mask(4, 4, 1);
  LandmarkSet gt;
  gt.points = {Vec2(100, 50)};
  RngStream rng(8);
  std::vector<double> xs, ys;
  for (int i = 0; i < 10000; ++i) {
    const auto out = detect_landmarks(mask, gt, m, rng);
    xs.push_back(out->points[0].x());
    ys.push_back(out->points[0].y());
  }
  for (const auto* v : {&xs, &ys}) {
    const double s = stddev(*v);
    EXPECT_GE(s, 0.45);
    EXPECT_LE(s, 0.55);
  }
}

TEST(SensorModels, Validation) {
  SensorModels m;
  EXPECT_NO_THROW(m.validate());
  EXPECT_DOUBLE_EQ(m.detector_latency_s, 0.016);
  m.lmc_rate_hz = 0.0;
  EXPECT_THROW(m.validate(), ConfigError);
  m = SensorModels{};
  m.detector_latency_s = -1.0;
  EXPECT_THROW(m.validate(), ConfigError);
}
