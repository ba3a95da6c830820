/*
 Copyright 2026 The wbmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <cmath>

#include "wbmpc/common.hpp"

// SO(3) helpers for the base orientation. Perturbations are applied on the
// right (body frame): R * exp(w).
namespace wbmpc::so3 {

inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

inline Quat exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-12) return Quat(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z()).normalized();
  return Quat(Eigen::AngleAxisd(angle, w / angle));
}

/// Rotation vector of q, using the shortest of the two quaternion covers.
inline Vec3 log(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double s = q.vec().norm();
  if (s < 1e-12) return 2.0 * q.vec();
  const double angle = 2.0 * std::atan2(s, q.w());
  return angle / s * q.vec();
}

/// Inverse right Jacobian: d log(R exp(d)) / dd at d = 0, for R = exp(phi).
inline Mat3 right_jacobian_inverse(const Vec3& phi) {
  const double angle = phi.norm();
  const Mat3 h = hat(phi);
  if (angle < 1e-6) return Mat3::Identity() + 0.5 * h + (1.0 / 12.0) * h * h;
  const double coef =
      1.0 / (angle * angle) - (1.0 + std::cos(angle)) / (2.0 * angle * std::sin(angle));
  return Mat3::Identity() + 0.5 * h + coef * h * h;
}

}  // namespace wbmpc::so3
