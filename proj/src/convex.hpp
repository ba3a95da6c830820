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

#include <array>

#include "wbmpc/geometry.hpp"

// GJK/EPA on "core" shapes. Spheres and capsules are handled as a point or a
// segment swept by a margin, which keeps their cores polyhedral.
namespace wbmpc::detail {

struct ConvexCore {
  enum class Kind { Point, Segment, Box, Cylinder };

  Kind kind = Kind::Point;
  Pose pose;
  Vec3 half_extents = Vec3::Zero();
  double radius = 0.0;
  double half_length = 0.0;
  double margin = 0.0;

  Vec3 support(const Vec3& direction) const;
};

/// Core of a primitive. With `exact_cylinder` false a cylinder is replaced by
/// the segment core of its enclosing capsule.
ConvexCore make_core(const Primitive& shape, const Pose& pose, bool exact_cylinder);

struct SupportVertex {
  Vec3 w;  // a - b
  Vec3 a;
  Vec3 b;
};

struct GjkResult {
  bool intersecting = false;
  double distance = 0.0;
  Vec3 point_a = Vec3::Zero();
  Vec3 point_b = Vec3::Zero();
  std::array<SupportVertex, 4> simplex;
  int simplex_size = 0;
  int iterations = 0;
};

struct EpaResult {
  double depth = 0.0;
  Vec3 point_a = Vec3::Zero();
  Vec3 point_b = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();  // from B toward A
};

inline constexpr double kGjkRelativeTolerance = 1e-10;
inline constexpr int kGjkMaxIterations = 128;
inline constexpr double kEpaTolerance = 1e-8;
inline constexpr int kEpaMaxFaces = 255;

GjkResult gjk(const ConvexCore& a, const ConvexCore& b);
EpaResult epa(const ConvexCore& a, const ConvexCore& b, const GjkResult& seed);

}  // namespace wbmpc::detail
