#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dpm/error.hpp"
#include "dpm/filters.hpp"
#include "oracles.hpp"

using namespace dpm;

namespace {

LandmarkSet set_of(std::vector<Vec2> pts, double t, LandmarkKind kind = LandmarkKind::kProjected) {
  LandmarkSet s;
  s.points = std::move(pts);
  s.timestamp = t;
  s.kind = kind;
  return s;
}

/// 21 landmarks translating at constant velocity.
LandmarkSet moving_set(double t, const Vec2& offset = Vec2::Zero()) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 21; ++i) {
    pts.emplace_back(40.0 + 7.0 * i + 120.0 * t + offset.x(), 90.0 - 3.0 * i - 35.0 * t + offset.y());
  }
  return set_of(std::move(pts), t);
}

}  // namespace

TEST(Propagation, FormulaExample) {
  const auto q = set_of({{10, 10}}, 0.1, LandmarkKind::kDetected);
  const auto now = set_of({{20, 5}}, 0.2);
  const auto old = set_of({{12, 5}}, 0.1);
  const auto out = propagate_q(q, now, old);
  EXPECT_EQ(out.points[0], Vec2(18, 10));
  EXPECT_EQ(out.timestamp, 0.2);
  EXPECT_EQ(out.kind, LandmarkKind::kEstimated);
}

TEST(Propagation, StaticProjectionKeepsDetection) {
  const auto q = set_of({{10, 10}, {3, 4}}, 0.1, LandmarkKind::kDetected);
  const auto p = set_of({{20, 5}, {1, 1}}, 0.1);
  auto p_now = p;
  p_now.timestamp = 0.3;
  EXPECT_EQ(propagate_q(q, p_now, p).points, q.points);
}

TEST(Propagation, ZeroBiasFollowsProjection) {
  const auto p_old = set_of({{10, 10}, {3, 4}}, 0.1);
  auto q = p_old;
  q.kind = LandmarkKind::kDetected;
  const auto p_now = set_of({{13, 9}, {-2, 7}}, 0.2);
  EXPECT_EQ(propagate_q(q, p_now, p_old).points, p_now.points);
}

TEST(Propagation, SizeMismatchThrows) {
  EXPECT_THROW(propagate_q(set_of({{1, 1}}, 0), set_of({{1, 1}, {2, 2}}, 0), set_of({{1, 1}}, 0)),
               InvalidArgument);
}

TEST(Propagation, ExactUnderUniformTranslation) {
  const Vec2 bias(-4.5, 2.25);
  std::vector<LandmarkSet> projected;
  for (int k = 0; k <= 100; ++k) projected.push_back(moving_set(k / 360.0));
  std::vector<LandmarkSet> detections;
  for (double capture : {0.05, 0.12, 0.2}) {
    auto q = moving_set(capture, bias);
    q.kind = LandmarkKind::kDetected;
    detections.push_back(q);
  }
  LandmarkFilter filter({FilterVariant::kPropagation, {}});
  const double T = 0.25;
  const auto est = std::get<LandmarkSet>(filter.estimate(detections, projected, T));
  const auto truth = moving_set(T, bias);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    EXPECT_NEAR((est.points[i] - truth.points[i]).norm(), 0.0, 1e-9);
  }
}

TEST(Interpolation, LinearAndClamped) {
  const std::vector<LandmarkSet> h{set_of({{0, 0}}, 1.0), set_of({{10, -4}}, 2.0)};
  EXPECT_EQ(interpolate_landmarks(h, 1.5).points[0], Vec2(5, -2));
  EXPECT_EQ(interpolate_landmarks(h, 0.0).points[0], Vec2(0, 0));
  EXPECT_EQ(interpolate_landmarks(h, 9.0).points[0], Vec2(10, -4));
  EXPECT_THROW(interpolate_landmarks({}, 1.0), InvalidArgument);
}

TEST(Kalman, StraightLineIsLearnedExactly) {
  const KalmanNoise noise{1e-9, 1e-6, 1e8};
  KalmanState s = kalman_init(Vec2(0, 0), 0.0, noise);
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.01 * k;
    s = kalman_step(s, 0.01, Vec2(t, 2 * t), noise).state;
  }
  const Vec2 ahead = kalman_step(s, 0.01, std::nullopt, noise).predicted;
  EXPECT_LT((ahead - Vec2(0.21, 0.42)).norm(), 1e-6);
}

TEST(Kalman, CoastingAdvancesByVelocity) {
  const KalmanNoise noise;
  KalmanState s = kalman_init(Vec2(3, 4), 0.0, noise);
  s.x(2) = 12.5;
  s.x(3) = -7.0;
  const Vec2 start(s.x(0), s.x(1));
  for (int k = 1; k <= 25; ++k) {
    s = kalman_step(s, 0.004, std::nullopt, noise).state;
    EXPECT_NEAR(s.x(0), start.x() + k * 0.004 * 12.5, 1e-12);
    EXPECT_NEAR(s.x(1), start.y() + k * 0.004 * -7.0, 1e-12);
  }
  EXPECT_THROW(kalman_step(s, -0.1, std::nullopt, noise), InvalidArgument);
}

TEST(Kalman, MatchesReferenceOnSinusoid) {
  const KalmanNoise noise;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> jitter(0.0, 0.5);
  auto track = [](double t) { return Vec2(128 + 40 * std::sin(3.1 * t), 96 + 25 * std::cos(2.3 * t)); };
  KalmanState s = kalman_init(track(0), 0.0, noise);
  oracle::ReferenceKalman ref(track(0), noise.process, noise.measurement, noise.initial_velocity);
  double rms_impl = 0.0, rms_ref = 0.0;
  for (int k = 1; k <= 600; ++k) {
    const double t = k * 0.005;
    const Vec2 z = track(t) + Vec2(jitter(rng), jitter(rng));
    const auto r = kalman_step(s, 0.005, z, noise);
    const Vec2 expected = ref.step(0.005, z);
    ASSERT_NEAR((r.predicted - expected).norm(), 0.0, 1e-9);
    s = r.state;
    rms_impl += (r.predicted - track(t)).squaredNorm();
    rms_ref += (expected - track(t)).squaredNorm();
  }
  EXPECT_NEAR(std::sqrt(rms_impl / 600), std::sqrt(rms_ref / 600), 1e-9);
}

TEST(Kalman, CovarianceStaysPsd) {
  const KalmanNoise noise;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dt(0.0, 0.05), pos(-500, 500);
  std::bernoulli_distribution has_z(0.7);
  KalmanState s = kalman_init(Vec2(0, 0), 0.0, noise);
  double worst = 0.0;
  int repairs = 0;
  for (int k = 0; k < 100000; ++k) {
    std::optional<Vec2> z;
    if (has_z(rng)) z = Vec2(pos(rng), pos(rng));
    const auto r = kalman_step(s, dt(rng), z, noise);
    repairs += r.repaired ? 1 : 0;
    s = r.state;
    worst = std::min(worst, min_eigenvalue(s.cov));
  }
  EXPECT_GE(worst, -1e-9);
  EXPECT_EQ(repairs, 0);
}

TEST(LandmarkFilter, VariantBehaviour) {
  std::vector<LandmarkSet> projected{moving_set(0.0), moving_set(0.01), moving_set(0.02)};
  auto q = moving_set(0.005, Vec2(2, 0));
  q.kind = LandmarkKind::kDetected;
  const std::vector<LandmarkSet> detections{q};
  const auto ideal = moving_set(0.02);
  const double T = 0.02;

  LandmarkFilter baseline({FilterVariant::kBaseline, {}});
  EXPECT_TRUE(std::holds_alternative<SkipMls>(baseline.estimate(detections, projected, T, &ideal)));

  LandmarkFilter oracle_filter({FilterVariant::kIdeal, {}});
  const auto best = std::get<LandmarkSet>(oracle_filter.estimate(detections, projected, T, &ideal));
  EXPECT_EQ(best.points, ideal.points);
  EXPECT_THROW(oracle_filter.estimate(detections, projected, T), InvalidArgument);

  LandmarkFilter naive({FilterVariant::kNaive, {}});
  const auto stale = std::get<LandmarkSet>(naive.estimate(detections, projected, T));
  EXPECT_EQ(stale.points, q.points);
  EXPECT_EQ(stale.timestamp, q.timestamp);
  EXPECT_LT(stale.timestamp, T);

  for (FilterVariant v : {FilterVariant::kNaive, FilterVariant::kKalmanCv, FilterVariant::kPropagation}) {
    LandmarkFilter f({v, {}});
    EXPECT_TRUE(std::holds_alternative<SkipMls>(f.estimate({}, projected, T)));
  }
}

TEST(LandmarkFilter, HistoriesAreNotMutated) {
  std::vector<LandmarkSet> projected;
  std::vector<LandmarkSet> detections;
  for (int k = 0; k < 30; ++k) projected.push_back(moving_set(k / 360.0));
  for (int k = 0; k < 5; ++k) {
    auto q = moving_set(k * 0.016, Vec2(1, 1));
    q.kind = LandmarkKind::kDetected;
    detections.push_back(q);
  }
  const auto p_copy = projected;
  const auto d_copy = detections;
  for (FilterVariant v : all_filter_variants()) {
    LandmarkFilter f({v, {}});
    const auto ideal = moving_set(0.08);
    for (double T : {0.07, 0.075, 0.08}) f.estimate(detections, projected, T, &ideal);
    for (std::size_t i = 0; i < projected.size(); ++i) ASSERT_EQ(projected[i].points, p_copy[i].points);
    for (std::size_t i = 0; i < detections.size(); ++i) ASSERT_EQ(detections[i].points, d_copy[i].points);
  }
}

TEST(LandmarkFilter, KalmanBankTracksIncrementalDetections) {
  const KalmanNoise noise;
  std::vector<LandmarkSet> detections;
  LandmarkFilter f({FilterVariant::kKalmanCv, noise});
  std::vector<oracle::ReferenceKalman> refs;
  for (int k = 0; k < 12; ++k) {
    auto q = moving_set(k * 0.016, Vec2(1, -1));
    q.kind = LandmarkKind::kDetected;
    detections.push_back(q);
    const double T = q.timestamp + 0.02;
    const auto est = std::get<LandmarkSet>(f.estimate(detections, {}, T));
    if (k == 0) {
      for (const auto& p : q.points) refs.emplace_back(p, noise.process, noise.measurement, noise.initial_velocity);
    } else {
      for (std::size_t i = 0; i < refs.size(); ++i) refs[i].step(0.016, q.points[i]);
    }
    for (std::size_t i = 0; i < refs.size(); ++i) {
      oracle::ReferenceKalman ahead = refs[i];
      ASSERT_NEAR((est.points[i] - ahead.step(0.02, std::nullopt)).norm(), 0.0, 1e-9);
    }
  }
  EXPECT_EQ(f.covariance_repairs(), 0u);
}

TEST(FilterVariant, Names) {
  for (FilterVariant v : all_filter_variants()) EXPECT_EQ(parse_filter_variant(to_string(v)), v);
  EXPECT_EQ(all_filter_variants().size(), 5u);
  try {
    parse_filter_variant("lowpass");
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    for (const char* n : {"baseline", "naive", "kalman_cv", "propagation", "ideal"}) {
      EXPECT_NE(msg.find(n), std::string::npos) << n;
    }
  }
}
