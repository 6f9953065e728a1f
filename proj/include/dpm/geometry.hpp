#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dpm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rotation followed by translation; units are millimetres.
struct RigidTransform {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  RigidTransform inverse() const {
    const Quat inv = rotation.conjugate();
    return {inv, -(inv * translation)};
  }
};

/// Rotation by `angle` radians about `axis` (need not be normalised).
Quat axis_angle(const Vec3& axis, double angle);

/// q^s for a unit quaternion, taking the short arc; s may exceed 1.
Quat quat_pow(const Quat& q, double s);

/// Angle in radians of the rotation carried by a unit quaternion, in [0, pi].
double rotation_angle(const Quat& q);

}  // namespace dpm
