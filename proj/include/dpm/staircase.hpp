#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dpm {

enum class StaircaseStatus { kRunning, kDone, kMaxTrials };

std::string to_string(StaircaseStatus status);

struct StaircaseParams {
  double start_latency_ms = 20.0;
  double base_step_ms = 2.0;
  double min_step_ms = 0.25;
  int max_trials = 500;
  int target_reversals = 10;

  /// Throws InvalidArgument on non-positive values or min step > base step.
  void validate() const;
};

struct StaircaseState {
  double latency_ms = 20.0;
  double step_ms = 2.0;
  double min_step_ms = 0.25;
  int reversals = 0;
  std::optional<bool> last_correct;
  int trial = 0;
  std::vector<double> reversal_latencies;
  StaircaseStatus status = StaircaseStatus::kRunning;
  int max_trials = 500;
  int target_reversals = 10;

  static StaircaseState start(const StaircaseParams& params);
};

/// A flip in correctness is a reversal: the latency presented on that
/// trial is recorded and the step halves down to the minimum. Then,
/// correct: latency -= step (floored at 0); wrong: latency += 3 step, using
/// the step after any halving.
/// Throws InvalidArgument when the staircase is not running.
StaircaseState staircase_step(const StaircaseState& state, bool correct);

/// Synthetic forced-choice observer.
struct ObserverModel {
  double threshold_ms = 6.0;
  double slope_ms = 1.0;
  double lapse = 0.02;
  double guess = 0.5;
  std::uint64_t seed = 1;

  /// guess + (1 - guess - lapse) * logistic((latency - threshold) / slope).
  double p_correct(double latency_ms) const;
  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  double latency_ms = 0.0;
  bool correct = false;
  double step_ms = 0.0;
  bool reversal = false;
};

struct SessionResult {
  /// Mean reversal latency; the final latency when no reversal occurred.
  double jnd_ms = 0.0;
  double final_latency_ms = 0.0;
  StaircaseStatus status = StaircaseStatus::kRunning;
  int reversals = 0;
  std::vector<TrialRecord> trace;
};

SessionResult run_session(const ObserverModel& observer, const StaircaseParams& params);

/// Columns trial,latency_ms,correct,step_ms,reversal.
void write_trial_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trace);

/// Key/value text block: jnd_ms, final_latency_ms, status, reversals, trials.
std::string summary_block(const SessionResult& result);

}  // namespace dpm
