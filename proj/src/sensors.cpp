#include "dpm/sensors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dpm/error.hpp"

namespace dpm {

void SensorModels::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("{} must be > 0", name));
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("{} must be >= 0", name));
  };
  positive(lmc_rate_hz, "lmc.rate");
  non_negative(lmc_latency_s, "lmc.latency");
  non_negative(lmc_jitter_std_mm, "lmc.jitter_std");
  positive(camera_interval_s, "camera.interval");
  non_negative(camera_latency_s, "camera.latency");
  positive(detector_latency_s, "detector.latency");
  non_negative(detector_jitter_std_px, "detector.jitter_std");
}

Pose lmc_observe(const Pose& gt, const SensorModels& models, RngStream& rng) {
  if (!models.lmc_bias_mm.empty() && models.lmc_bias_mm.size() != gt.joints.size()) {
    throw InvalidArgument(fmt::format("lmc bias has {} entries for {} joints",
                                      models.lmc_bias_mm.size(), gt.joints.size()));
  }
  Pose out = gt;
  for (std::size_t j = 0; j < out.joints.size(); ++j) {
    Vec3 offset = models.lmc_bias_mm.empty() ? Vec3::Zero() : models.lmc_bias_mm[j];
    for (int axis = 0; axis < 3; ++axis) offset[axis] += rng.normal(models.lmc_jitter_std_mm);
    out.joints[j].translation += offset;
  }
  return out;
}

std::optional<LandmarkSet> detect_landmarks(const Mask& camera_mask,
                                            const LandmarkSet& gt_landmarks_at_capture,
                                            const SensorModels& models, RngStream& rng) {
  const bool any = std::any_of(camera_mask.pixels().begin(), camera_mask.pixels().end(),
                               [](std::uint8_t v) { return v != 0; });
  if (!any) return std::nullopt;
  LandmarkSet out = gt_landmarks_at_capture;
  out.kind = LandmarkKind::kDetected;
  for (auto& p : out.points) {
    p.x() += rng.normal(models.detector_jitter_std_px);
    p.y() += rng.normal(models.detector_jitter_std_px);
  }
  return out;
}

}  // namespace dpm
