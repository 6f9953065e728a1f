#include "dpm/filters.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "dpm/error.hpp"

namespace dpm {

std::string to_string(FilterVariant variant) {
  switch (variant) {
    case FilterVariant::kBaseline: return "baseline";
    case FilterVariant::kNaive: return "naive";
    case FilterVariant::kKalmanCv: return "kalman_cv";
    case FilterVariant::kPropagation: return "propagation";
    case FilterVariant::kIdeal: return "ideal";
  }
  return "unknown";
}

std::vector<FilterVariant> all_filter_variants() {
  return {FilterVariant::kBaseline, FilterVariant::kNaive, FilterVariant::kKalmanCv,
          FilterVariant::kPropagation, FilterVariant::kIdeal};
}

std::string filter_variant_names() {
  std::string names;
  for (auto v : all_filter_variants()) {
    if (!names.empty()) names += ", ";
    names += to_string(v);
  }
  return names;
}

FilterVariant parse_filter_variant(const std::string& name) {
  for (auto v : all_filter_variants()) {
    if (to_string(v) == name) return v;
  }
  throw InvalidArgument(
      fmt::format("unknown filter variant '{}' (valid: {})", name, filter_variant_names()));
}

LandmarkSet propagate_q(const LandmarkSet& q_old, const LandmarkSet& p_now,
                        const LandmarkSet& p_old) {
  if (q_old.size() != p_now.size() || q_old.size() != p_old.size()) {
    throw InvalidArgument(fmt::format("propagate_q: cardinalities differ ({}, {}, {})",
                                      q_old.size(), p_now.size(), p_old.size()));
  }
  LandmarkSet out;
  out.kind = LandmarkKind::kEstimated;
  out.timestamp = p_now.timestamp;
  out.points.resize(q_old.size());
  for (std::size_t i = 0; i < q_old.size(); ++i) {
    out.points[i] = q_old.points[i] + p_now.points[i] - p_old.points[i];
  }
  return out;
}

LandmarkSet interpolate_landmarks(std::span<const LandmarkSet> history, double t) {
  if (history.empty()) throw InvalidArgument("interpolate_landmarks: empty history");
  if (t <= history.front().timestamp) return history.front();
  if (t >= history.back().timestamp) return history.back();
  const auto it = std::upper_bound(history.begin(), history.end(), t,
                                   [](double v, const LandmarkSet& s) { return v < s.timestamp; });
  const LandmarkSet& b = *it;
  const LandmarkSet& a = *(it - 1);
  if (a.size() != b.size()) throw InvalidArgument("interpolate_landmarks: cardinality changes");
  const double span = b.timestamp - a.timestamp;
  const double s = span > 0.0 ? (t - a.timestamp) / span : 1.0;
  LandmarkSet out;
  out.kind = a.kind;
  out.timestamp = t;
  out.points.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.points[i] = a.points[i] + s * (b.points[i] - a.points[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

KalmanState kalman_init(const Vec2& measurement, double timestamp, const KalmanNoise& noise) {
  KalmanState s;
  s.x << measurement.x(), measurement.y(), 0.0, 0.0;
  s.cov.setZero();
  s.cov(0, 0) = s.cov(1, 1) = noise.measurement;
  s.cov(2, 2) = s.cov(3, 3) = noise.initial_velocity;
  s.timestamp = timestamp;
  return s;
}

double min_eigenvalue(const Eigen::Matrix4d& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (cov + cov.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

KalmanStepResult kalman_step(const KalmanState& state, double dt,
                             const std::optional<Vec2>& measurement, const KalmanNoise& noise) {
  if (!(dt >= 0.0)) throw InvalidArgument("kalman_step: dt must be >= 0");
  KalmanStepResult r;
  r.state.timestamp = state.timestamp + dt;

  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = f(1, 3) = dt;
  const double q = noise.process;
  const double dt2 = dt * dt, dt3 = dt2 * dt;
  Eigen::Matrix4d process = Eigen::Matrix4d::Zero();
  process(0, 0) = process(1, 1) = q * dt3 / 3.0;
  process(0, 2) = process(2, 0) = process(1, 3) = process(3, 1) = q * dt2 / 2.0;
  process(2, 2) = process(3, 3) = q * dt;

  Eigen::Vector4d x = f * state.x;
  Eigen::Matrix4d cov = f * state.cov * f.transpose() + process;

  if (measurement) {
    // H selects the position; S = H P H^T + R is 2x2.
    const Eigen::Vector2d innovation(measurement->x() - x(0), measurement->y() - x(1));
    Eigen::Matrix2d s = cov.topLeftCorner<2, 2>();
    s(0, 0) += noise.measurement;
    s(1, 1) += noise.measurement;
    const Eigen::Matrix<double, 4, 2> gain = cov.leftCols<2>() * s.inverse();
    x += gain * innovation;
    Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity();
    ikh.leftCols<2>() -= gain;
    cov = ikh * cov;
    cov = 0.5 * (cov + cov.transpose());
    if (min_eigenvalue(cov) < -1e-9) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov);
      const Eigen::Vector4d clamped = es.eigenvalues().cwiseMax(0.0);
      cov = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
      r.repaired = true;
    }
  }
  r.state.x = x;
  r.state.cov = cov;
  r.predicted = {x(0), x(1)};
  return r;
}

// ---------------------------------------------------------------------------

void LandmarkFilter::ingest(std::span<const LandmarkSet> detections) {
  for (; consumed_ < detections.size(); ++consumed_) {
    const LandmarkSet& q = detections[consumed_];
    if (bank_.size() != q.size()) {
      bank_.clear();
      for (const auto& p : q.points) bank_.push_back(kalman_init(p, q.timestamp, strategy_.kalman));
      continue;
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double dt = std::max(0.0, q.timestamp - bank_[i].timestamp);
      auto r = kalman_step(bank_[i], dt, q.points[i], strategy_.kalman);
      if (r.repaired) ++repairs_;
      bank_[i] = r.state;
    }
  }
}

QEstimate LandmarkFilter::estimate(std::span<const LandmarkSet> detections,
                                   std::span<const LandmarkSet> projected, double T,
                                   const LandmarkSet* ideal) {
  switch (strategy_.variant) {
    case FilterVariant::kBaseline:
      return SkipMls{"baseline renders without MLS"};
    case FilterVariant::kIdeal: {
      if (ideal == nullptr) throw InvalidArgument("ideal filter needs ground-truth landmarks");
      LandmarkSet out = *ideal;
      out.kind = LandmarkKind::kEstimated;
      out.timestamp = T;
      return out;
    }
    default:
      break;
  }
  if (detections.empty()) return SkipMls{"no detection delivered yet"};
  const LandmarkSet& latest = detections.back();

  if (strategy_.variant == FilterVariant::kNaive) {
    LandmarkSet out = latest;
    out.kind = LandmarkKind::kEstimated;
    return out;
  }
  if (strategy_.variant == FilterVariant::kPropagation) {
    if (projected.empty()) return SkipMls{"no projected joints yet"};
    const LandmarkSet p_now = interpolate_landmarks(projected, T);
    const LandmarkSet p_old = interpolate_landmarks(projected, latest.timestamp);
    return propagate_q(latest, p_now, p_old);
  }

  ingest(detections);
  LandmarkSet out;
  out.kind = LandmarkKind::kEstimated;
  out.timestamp = T;
  out.points.reserve(bank_.size());
  for (const auto& s : bank_) {
    const double dt = std::max(0.0, T - s.timestamp);
    out.points.push_back(kalman_step(s, dt, std::nullopt, strategy_.kalman).predicted);
  }
  return out;
}

}  // namespace dpm
