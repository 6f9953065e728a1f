#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dpm/error.hpp"
#include "dpm/staircase.hpp"

using namespace dpm;

namespace {

double mean_jnd(double threshold, int sessions, std::uint64_t first_seed, std::vector<double>* each = nullptr) {
  double sum = 0.0;
  for (int s = 0; s < sessions; ++s) {
    ObserverModel o;
    o.threshold_ms = threshold;
    o.seed = first_seed + static_cast<std::uint64_t>(s);
    const double j = run_session(o, StaircaseParams{}).jnd_ms;
    if (each) each->push_back(j);
    sum += j;
  }
  return sum / sessions;
}

}  // namespace

TEST(StaircaseStep, CorrectAndWrongMoves) {
  const StaircaseState s = StaircaseState::start(StaircaseParams{});
  EXPECT_DOUBLE_EQ(s.latency_ms, 20.0);
  EXPECT_DOUBLE_EQ(staircase_step(s, true).latency_ms, 18.0);
  EXPECT_DOUBLE_EQ(staircase_step(s, false).latency_ms, 26.0);
}

TEST(StaircaseStep, ReversalHalvesStep) {
  StaircaseState s = StaircaseState::start(StaircaseParams{});
  s = staircase_step(s, true);
  EXPECT_EQ(s.reversals, 0);
  s = staircase_step(s, false);
  EXPECT_EQ(s.reversals, 1);
  EXPECT_DOUBLE_EQ(s.step_ms, 1.0);
  EXPECT_DOUBLE_EQ(s.latency_ms, 21.0);
  ASSERT_EQ(s.reversal_latencies.size(), 1u);
  EXPECT_DOUBLE_EQ(s.reversal_latencies[0], 18.0);
}

TEST(StaircaseStep, LatencyAndStepFloors) {
  StaircaseParams p;
  p.start_latency_ms = 1.0;
  StaircaseState s = StaircaseState::start(p);
  s = staircase_step(s, true);
  EXPECT_DOUBLE_EQ(s.latency_ms, 0.0);
  for (int k = 0; k < 40 && s.status == StaircaseStatus::kRunning; ++k) {
    s = staircase_step(s, k % 2 == 0);
    EXPECT_GE(s.latency_ms, 0.0);
    EXPECT_GE(s.step_ms, p.min_step_ms);
  }
}

TEST(StaircaseStep, StopsAtTargetReversals) {
  StaircaseParams p;
  p.target_reversals = 3;
  StaircaseState s = StaircaseState::start(p);
  for (bool c : {true, false, true, false}) s = staircase_step(s, c);
  EXPECT_EQ(s.status, StaircaseStatus::kDone);
  EXPECT_THROW(staircase_step(s, true), InvalidArgument);
}

TEST(StaircaseParams, Validation) {
  StaircaseParams p;
  EXPECT_NO_THROW(p.validate());
  p.min_step_ms = 3.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = StaircaseParams{};
  p.max_trials = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  ObserverModel o;
  o.lapse = 0.6;
  EXPECT_THROW(o.validate(), InvalidArgument);
}

TEST(Observer, PsychometricShape) {
  ObserverModel o;
  EXPECT_NEAR(o.p_correct(6.0), 0.5 + 0.48 * 0.5, 1e-12);
  EXPECT_NEAR(o.p_correct(1e6), 0.98, 1e-12);
  EXPECT_NEAR(o.p_correct(-1e6), 0.5, 1e-12);
  EXPECT_LT(o.p_correct(4.0), o.p_correct(8.0));
}

TEST(Session, AlwaysCorrectObserverHitsTrialCap) {
  ObserverModel o;
  o.threshold_ms = -std::numeric_limits<double>::infinity();
  o.lapse = 0.0;
  const SessionResult r = run_session(o, StaircaseParams{});
  EXPECT_EQ(r.status, StaircaseStatus::kMaxTrials);
  EXPECT_EQ(r.reversals, 0);
  EXPECT_EQ(r.trace.size(), 500u);
  EXPECT_DOUBLE_EQ(r.final_latency_ms, 0.0);
  EXPECT_DOUBLE_EQ(r.jnd_ms, 0.0);
}

TEST(Session, ReplayIsIdentical) {
  ObserverModel o;
  o.seed = 17;
  const SessionResult a = run_session(o, StaircaseParams{});
  const SessionResult b = run_session(o, StaircaseParams{});
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].latency_ms, b.trace[k].latency_ms);
    EXPECT_EQ(a.trace[k].correct, b.trace[k].correct);
  }
  EXPECT_EQ(a.jnd_ms, b.jnd_ms);
  EXPECT_EQ(summary_block(a), summary_block(b));
}

TEST(Session, RecoversConfiguredThreshold) {
  const double six = mean_jnd(6.0, 50, 1);
  EXPECT_GE(six, 4.5);
  EXPECT_LE(six, 7.5);
  const double three = mean_jnd(3.0, 50, 1);
  EXPECT_GE(three, 2.0);
  EXPECT_LE(three, 4.0);
}

TEST(Session, OrdersDistinctThresholds) {
  std::vector<double> low, high;
  mean_jnd(3.0, 50, 1000, &low);
  mean_jnd(6.6, 50, 1000, &high);
  int ordered = 0;
  for (std::size_t k = 0; k < low.size(); ++k) ordered += low[k] < high[k] ? 1 : 0;
  EXPECT_GE(ordered, 45);
}
