#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpm/image.hpp"
#include "dpm/landmarks.hpp"
#include "dpm/timeline.hpp"

namespace dpm {

/// Uniform cubic B-spline with `knot_count` breakpoints spanning [t0, t1]
/// (knot_count + 2 control values).
class CubicBSpline {
 public:
  CubicBSpline() = default;
  CubicBSpline(double t0, double t1, Eigen::VectorXd coefficients);

  /// Least-squares fit of (t, value) samples.
  static CubicBSpline fit(std::span<const double> t, std::span<const double> values,
                          double t0, double t1, int knot_count);

  double operator()(double t) const;
  double derivative(double t) const;
  int knot_count() const { return static_cast<int>(coefficients_.size()) - 2; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }

 private:
  double t0_ = 0.0, t1_ = 1.0;
  Eigen::VectorXd coefficients_;
};

/// Per-landmark 2D spline fit of an ideal run.
struct SplineFit {
  std::vector<CubicBSpline> x, y;
  int knot_count = 0;
  /// Samples per second in the fitted traces; sets the search density.
  double sample_rate_hz = 0.0;
  double rms_residual_px = 0.0;
  double max_residual_px = 0.0;

  std::size_t landmark_count() const { return x.size(); }
  double t0() const { return x.front().t0(); }
  double t1() const { return x.front().t1(); }
  Vec2 evaluate(std::size_t landmark, double t) const;
  Vec2 velocity(std::size_t landmark, double t) const;
};

/// knot count = samples / 10 clamped to [4, 64] when `knot_count` is 0.
/// Throws InvalidArgument with fewer than 8 samples or ragged input.
SplineFit fit_ideal_spline(std::span<const LandmarkSet> traces, int knot_count = 0);

/// Distance from `point` to the image of landmark's curve: dense search at
/// 10x the fitted sample rate within +-window_s of `hint_time`, then
/// golden-section refinement around the best sample.
double distance_to_curve(const SplineFit& fit, std::size_t landmark, const Vec2& point,
                         double hint_time, double window_s = 0.1);

/// |a & b| / |a | b|, 1 when both are empty. Throws on a shape mismatch.
double mask_iou(const Mask& a, const Mask& b);

struct FrameMetrics {
  int tick = 0;
  double time = 0.0;  // presentation time
  double mean_error = 0.0;
  double median_error = 0.0;
  double max_error = 0.0;
  /// Mean |d/dt x| of the ideal curve over landmarks, px/s (0 without a fit).
  double mean_abs_velocity_x = 0.0;
  /// Only meaningful when images were rendered.
  double iou = 0.0;
  double fill_ratio = 0.0;
};

/// Statistics over the per-frame mean errors.
struct RunSummary {
  std::size_t frames = 0;
  double mean_error = 0.0;
  double median_error = 0.0;
  double p95_error = 0.0;
  double max_error = 0.0;
  bool has_images = false;
  double mean_iou = 0.0;
  double min_iou = 0.0;
  double mean_fill_ratio = 0.0;
};

struct MetricsReport {
  std::vector<FrameMetrics> frames;
  RunSummary summary;
};

/// Per-frame errors are distances to the ideal curve when `ideal` is given
/// and distances to ground truth otherwise. Frames without a finite
/// estimate (before the first pose sample) are left out.
MetricsReport build_report(std::span<const FrameLog> frames, const SplineFit* ideal = nullptr);

/// Landmarks after correction for every frame with finite values, stamped
/// with the presentation time; input to fit_ideal_spline.
std::vector<LandmarkSet> corrected_traces(std::span<const FrameLog> frames);

void write_report_csv(const std::filesystem::path& path, const MetricsReport& report);
/// Human-readable key: value block.
std::string summary_text(const RunSummary& summary);

}  // namespace dpm
