#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dpm/hand_model.hpp"
#include "dpm/image.hpp"
#include "dpm/landmarks.hpp"

namespace dpm {

/// Seedable random stream handed explicitly to every noisy sensor.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Zero-mean Gaussian sample; exactly 0 when `stddev` is 0 (no draw).
  double normal(double stddev) {
    if (stddev == 0.0) return 0.0;
    return stddev * unit_(engine_);
  }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> unit_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Timing and noise of the three sensors.
struct SensorModels {
  double lmc_rate_hz = 100.0;
  double lmc_latency_s = 0.010;
  /// Constant per-joint offset in mm; empty means no bias.
  std::vector<Vec3> lmc_bias_mm;
  double lmc_jitter_std_mm = 0.2;

  double camera_interval_s = 0.00185;
  double camera_latency_s = 0.0;

  double detector_latency_s = 0.016;
  double detector_jitter_std_px = 0.5;

  /// Throws ConfigError on non-positive rates or negative latencies.
  void validate() const;

  static std::vector<Vec3> uniform_bias(const Vec3& bias, int joints = kHandJointCount) {
    return std::vector<Vec3>(static_cast<std::size_t>(joints), bias);
  }
};

/// Estimator output for ground truth `gt` captured at gt.timestamp: every
/// joint translated by its bias plus isotropic Gaussian jitter. The caller
/// samples `gt` at (delivery time - lmc_latency).
Pose lmc_observe(const Pose& gt, const SensorModels& models, RngStream& rng);

/// Simulated 2D detector. Returns nothing when the camera mask is empty
/// (no hand in view); otherwise ground truth plus per-axis pixel jitter,
/// stamped with the capture time. The timeline delivers the result
/// `detector_latency_s` later.
std::optional<LandmarkSet> detect_landmarks(const Mask& camera_mask,
                                            const LandmarkSet& gt_landmarks_at_capture,
                                            const SensorModels& models, RngStream& rng);

}  // namespace dpm
