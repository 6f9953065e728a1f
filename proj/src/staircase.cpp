#include "dpm/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <fmt/os.h>

#include "dpm/error.hpp"

namespace dpm {

std::string to_string(StaircaseStatus status) {
  switch (status) {
    case StaircaseStatus::kRunning: return "running";
    case StaircaseStatus::kDone: return "done";
    case StaircaseStatus::kMaxTrials: return "max_trials";
  }
  return "unknown";
}

void StaircaseParams::validate() const {
  if (!(start_latency_ms >= 0.0) || !std::isfinite(start_latency_ms)) {
    throw InvalidArgument("start latency must be finite and >= 0");
  }
  if (!(min_step_ms > 0.0)) throw InvalidArgument("min step must be > 0");
  if (!(base_step_ms >= min_step_ms)) {
    throw InvalidArgument(
        fmt::format("min step ({}) must not exceed base step ({})", min_step_ms, base_step_ms));
  }
  if (max_trials < 1) throw InvalidArgument("max trials must be >= 1");
  if (target_reversals < 1) throw InvalidArgument("target reversals must be >= 1");
}

StaircaseState StaircaseState::start(const StaircaseParams& params) {
  params.validate();
  StaircaseState s;
  s.latency_ms = params.start_latency_ms;
  s.step_ms = params.base_step_ms;
  s.min_step_ms = params.min_step_ms;
  s.max_trials = params.max_trials;
  s.target_reversals = params.target_reversals;
  return s;
}

StaircaseState staircase_step(const StaircaseState& state, bool correct) {
  if (state.status != StaircaseStatus::kRunning) {
    throw InvalidArgument("staircase already finished (" + to_string(state.status) + ")");
  }
  StaircaseState next = state;
  const double presented = state.latency_ms;
  if (state.last_correct.has_value() && *state.last_correct != correct) {
    ++next.reversals;
    next.reversal_latencies.push_back(presented);
    next.step_ms = std::max(state.step_ms / 2.0, state.min_step_ms);
  }
  if (correct) {
    next.latency_ms = std::max(0.0, presented - next.step_ms);
  } else {
    next.latency_ms = presented + 3.0 * next.step_ms;
  }
  next.last_correct = correct;
  ++next.trial;
  if (next.reversals >= next.target_reversals) {
    next.status = StaircaseStatus::kDone;
  } else if (next.trial >= next.max_trials) {
    next.status = StaircaseStatus::kMaxTrials;
  }
  return next;
}

double ObserverModel::p_correct(double latency_ms) const {
  const double z = (latency_ms - threshold_ms) / slope_ms;
  double logistic;
  if (std::isnan(z)) {
    logistic = 0.5;
  } else if (z >= 0) {
    logistic = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    logistic = e / (1.0 + e);
  }
  return guess + (1.0 - guess - lapse) * logistic;
}

void ObserverModel::validate() const {
  if (!(slope_ms > 0.0)) throw InvalidArgument("observer slope must be > 0");
  if (!(lapse >= 0.0 && lapse < 1.0 - guess)) {
    throw InvalidArgument("observer lapse must lie in [0, 1 - guess)");
  }
  if (!(guess >= 0.0 && guess < 1.0)) throw InvalidArgument("observer guess must lie in [0, 1)");
  if (std::isnan(threshold_ms)) throw InvalidArgument("observer threshold is NaN");
}

SessionResult run_session(const ObserverModel& observer, const StaircaseParams& params) {
  observer.validate();
  StaircaseState state = StaircaseState::start(params);
  std::mt19937_64 engine(observer.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SessionResult result;
  while (state.status == StaircaseStatus::kRunning) {
    const bool correct = unit(engine) < observer.p_correct(state.latency_ms);
    TrialRecord rec;
    rec.trial = state.trial;
    rec.latency_ms = state.latency_ms;
    rec.correct = correct;
    rec.step_ms = state.step_ms;
    const int before = state.reversals;
    state = staircase_step(state, correct);
    rec.reversal = state.reversals != before;
    result.trace.push_back(rec);
  }
  result.status = state.status;
  result.reversals = state.reversals;
  result.final_latency_ms = state.latency_ms;
  if (state.reversal_latencies.empty()) {
    result.jnd_ms = state.latency_ms;
  } else {
    result.jnd_ms = std::accumulate(state.reversal_latencies.begin(),
                                    state.reversal_latencies.end(), 0.0) /
                    static_cast<double>(state.reversal_latencies.size());
  }
  return result;
}

void write_trial_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "trial,latency_ms,correct,step_ms,reversal\n";
  for (const auto& r : trace) {
    out << fmt::format("{},{:.17g},{},{:.17g},{}\n", r.trial, r.latency_ms, r.correct ? 1 : 0,
                       r.step_ms, r.reversal ? 1 : 0);
  }
}

std::string summary_block(const SessionResult& result) {
  return fmt::format(
      "{{\n  \"jnd_ms\": {:.6f},\n  \"final_latency_ms\": {:.6f},\n  \"status\": \"{}\",\n"
      "  \"reversals\": {},\n  \"trials\": {}\n}}\n",
      result.jnd_ms, result.final_latency_ms, to_string(result.status), result.reversals,
      result.trace.size());
}

}  // namespace dpm
