#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dpm/landmarks.hpp"

namespace dpm {

enum class FilterVariant { kBaseline, kNaive, kKalmanCv, kPropagation, kIdeal };

std::string to_string(FilterVariant variant);
/// Throws InvalidArgument naming the valid variants.
FilterVariant parse_filter_variant(const std::string& name);
std::vector<FilterVariant> all_filter_variants();
std::string filter_variant_names();

/// Q̂_T = Q_{T-tL} + P_T - P_{T-tL}, elementwise; timestamp T = p_now.timestamp.
LandmarkSet propagate_q(const LandmarkSet& q_old, const LandmarkSet& p_now,
                        const LandmarkSet& p_old);

/// Piecewise-linear interpolation of a time-ordered history; clamps at the ends.
LandmarkSet interpolate_landmarks(std::span<const LandmarkSet> history, double t);

// ---------------------------------------------------------------------------
// Constant-velocity Kalman filter, one per landmark.

struct KalmanNoise {
  /// Spectral density of the white-noise acceleration, px^2/s^3.
  double process = 2.0e3;
  /// Measurement variance, px^2.
  double measurement = 0.1;
  /// Initial velocity variance, (px/s)^2.
  double initial_velocity = 1.0e4;
};

/// State (x, y, vx, vy) and covariance.
struct KalmanState {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
  double timestamp = 0.0;
};

struct KalmanStepResult {
  KalmanState state;
  Vec2 predicted;
  /// True when the updated covariance had to be symmetrised and clamped
  /// back to PSD.
  bool repaired = false;
};

KalmanState kalman_init(const Vec2& measurement, double timestamp, const KalmanNoise& noise);

/// Predict over `dt` (>= 0) with the constant-velocity model, then update
/// with the measurement if one is given. `predicted` is the resulting
/// position estimate.
KalmanStepResult kalman_step(const KalmanState& state, double dt,
                             const std::optional<Vec2>& measurement, const KalmanNoise& noise);

double min_eigenvalue(const Eigen::Matrix4d& cov);

// ---------------------------------------------------------------------------

struct FilterStrategy {
  FilterVariant variant = FilterVariant::kPropagation;
  KalmanNoise kalman;
};

/// Directive: render without MLS correction this frame.
struct SkipMls {
  std::string reason;
};

using QEstimate = std::variant<LandmarkSet, SkipMls>;

/// Produces Q̂ at render time T from stale detector output. Holds the
/// per-landmark Kalman bank for the kalman_cv variant; the histories are
/// only read.
class LandmarkFilter {
 public:
  explicit LandmarkFilter(FilterStrategy strategy) : strategy_(strategy) {}

  /// `detections` are Q sets stamped with capture time (delivered <= T);
  /// `projected` are P sets stamped with the time they describe;
  /// `ideal` is ground truth at T and is only read by the ideal variant.
  QEstimate estimate(std::span<const LandmarkSet> detections,
                     std::span<const LandmarkSet> projected, double T,
                     const LandmarkSet* ideal = nullptr);

  const FilterStrategy& strategy() const { return strategy_; }
  std::size_t covariance_repairs() const { return repairs_; }

 private:
  void ingest(std::span<const LandmarkSet> detections);

  FilterStrategy strategy_;
  std::vector<KalmanState> bank_;
  std::size_t consumed_ = 0;
  std::size_t repairs_ = 0;
};

}  // namespace dpm
