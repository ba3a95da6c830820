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

#include <string_view>
#include <variant>

#include "wbmpc/common.hpp"

namespace wbmpc {

/// Rigid placement of a body in the world (or in a parent frame).
struct Pose {
  Vec3 translation = Vec3::Zero();
  Quat rotation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3& t, const Quat& q) : translation(t), rotation(q) {}

  /// URDF convention: R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static Pose from_xyz_rpy(const Vec3& xyz, const Vec3& rpy);

  Vec3 operator*(const Vec3& point) const { return translation + rotation * point; }
  Pose operator*(const Pose& other) const {
    return {translation + rotation * other.translation, rotation * other.rotation};
  }
  Pose inverse() const {
    const Quat inv = rotation.conjugate();
    return {-(inv * translation), inv};
  }
  Mat3 rotation_matrix() const { return rotation.toRotationMatrix(); }
  bool is_normalized(double tol = 1e-9) const {
    return std::abs(rotation.norm() - 1.0) <= tol;
  }
};

// Cylinders and capsules are aligned with their local z axis.
struct Sphere {
  double radius;
};
struct Box {
  Vec3 half_extents;
};
struct Cylinder {
  double radius;
  double half_length;
};
struct Capsule {
  double radius;
  double half_length;
};

using Primitive = std::variant<Sphere, Box, Cylinder, Capsule>;

/// Throws GeometryError unless every dimension is strictly positive and finite.
void validate(const Primitive& shape);
std::string_view shape_name(const Primitive& shape);

struct Aabb {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return 0.5 * (min + max); }
  Aabb merged(const Aabb& other) const {
    return {min.cwiseMin(other.min), max.cwiseMax(other.max)};
  }
  /// Euclidean gap between the boxes, 0 when they touch or overlap.
  double distance(const Aabb& other) const;
  bool overlaps(const Aabb& other) const;
};

struct DistanceResult {
  /// Positive when separated, minus the penetration depth when overlapping.
  double signed_distance = 0.0;
  Vec3 point_a = Vec3::Zero();
  Vec3 point_b = Vec3::Zero();
  /// Unit vector pointing from body B toward body A: moving A along it
  /// increases the signed distance.
  Vec3 normal = Vec3::UnitX();
  /// Set when a penetrating cylinder was replaced by its enclosing capsule.
  bool approximate = false;
};

Vec3 support_point(const Primitive& shape, const Pose& pose, const Vec3& direction);

DistanceResult pair_distance(const Primitive& a, const Pose& pose_a, const Primitive& b,
                             const Pose& pose_b);

Aabb aabb_of(const Primitive& shape, const Pose& pose);

}  // namespace wbmpc
