#include "dpm/geometry.hpp"

#include <cmath>

namespace dpm {

Quat axis_angle(const Vec3& axis, double angle) {
  return Quat(Eigen::AngleAxisd(angle, axis.normalized()));
}

Quat quat_pow(const Quat& q, double s) {
  Quat u = q.normalized();
  if (u.w() < 0.0) u.coeffs() = -u.coeffs();
  const double vnorm = u.vec().norm();
  if (vnorm < 1e-15) return Quat::Identity();
  const double half = std::atan2(vnorm, u.w());
  const double scaled = half * s;
  const Vec3 axis = u.vec() / vnorm;
  Quat out;
  out.w() = std::cos(scaled);
  out.vec() = axis * std::sin(scaled);
  return out;
}

double rotation_angle(const Quat& q) {
  const Quat u = q.normalized();
  return 2.0 * std::atan2(u.vec().norm(), std::abs(u.w()));
}

}  // namespace dpm
