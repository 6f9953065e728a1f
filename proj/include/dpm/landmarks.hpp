#pragma once

#include <vector>

#include "dpm/geometry.hpp"

namespace dpm {

enum class LandmarkKind {
  kProjected,  // P: estimator joints projected through the render camera
  kDetected,   // Q: 2D detector output
  kEstimated,  // Q̂: filtered estimate of Q at render time
};

/// 2D landmark positions in pixels, one per hand joint.
struct LandmarkSet {
  std::vector<Vec2> points;
  double timestamp = 0.0;
  LandmarkKind kind = LandmarkKind::kProjected;

  std::size_t size() const { return points.size(); }
  bool all_finite() const;
};

inline bool LandmarkSet::all_finite() const {
  for (const auto& p : points) {
    if (!p.allFinite()) return false;
  }
  return true;
}

}  // namespace dpm
