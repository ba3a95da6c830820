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
#include "wbmpc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "convex.hpp"

namespace wbmpc {

namespace {

constexpr double kDegenerate = 1e-12;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

struct CoreSolution {
  double core_distance;  // negative when the cores overlap (EPA depth)
  Vec3 point_a;
  Vec3 point_b;
  Vec3 normal;  // from B toward A
};

DistanceResult inflate(const CoreSolution& core, double margin_a, double margin_b) {
  DistanceResult r;
  r.normal = core.normal;
  r.point_a = core.point_a - margin_a * core.normal;
  r.point_b = core.point_b + margin_b * core.normal;
  r.signed_distance = core.core_distance - margin_a - margin_b;
  return r;
}

Vec3 any_perpendicular(const Vec3& u) {
  Eigen::Index least = 0;
  u.cwiseAbs().minCoeff(&least);
  return u.cross(Vec3::Unit(least)).normalized();
}

// Closest points between segments [p1,q1] and [p2,q2]; points are segments of
// zero length.
void closest_segments(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2, Vec3& c1,
                      Vec3& c2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double eps = 1e-24;
  double s = 0.0;
  double t = 0.0;
  if (a <= eps && e <= eps) {
    s = t = 0.0;
  } else if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-12 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  c1 = p1 + s * d1;
  c2 = p2 + t * d2;
}

struct SweptCore {
  Vec3 p;
  Vec3 q;
  double radius;
  bool is_point;
};

SweptCore swept_core(const Primitive& shape, const Pose& pose) {
  if (const auto* s = std::get_if<Sphere>(&shape))
    return {pose.translation, pose.translation, s->radius, true};
  const auto& c = std::get<Capsule>(shape);
  const Vec3 axis = pose.rotation * Vec3::UnitZ();
  return {pose.translation - c.half_length * axis, pose.translation + c.half_length * axis,
          c.radius, false};
}

// Sphere/capsule pairs: exact closest points between the core segments.
DistanceResult swept_distance(const Primitive& a, const Pose& pose_a, const Primitive& b,
                              const Pose& pose_b) {
  const SweptCore ca = swept_core(a, pose_a);
  const SweptCore cb = swept_core(b, pose_b);
  Vec3 pa, pb;
  closest_segments(ca.p, ca.q, cb.p, cb.q, pa, pb);
  const Vec3 diff = pa - pb;
  const double dist = diff.norm();
  Vec3 normal;
  if (dist > kDegenerate) {
    normal = diff / dist;
  } else if (ca.is_point && cb.is_point) {
    throw GeometryError("degenerate normal");
  } else {
    const Vec3 ua = ca.is_point ? Vec3::Zero() : Vec3(ca.q - ca.p).normalized();
    const Vec3 ub = cb.is_point ? Vec3::Zero() : Vec3(cb.q - cb.p).normalized();
    const Vec3 cross = ua.cross(ub);
    if (cross.norm() > 1e-9) {
      normal = cross.normalized();
    } else {
      normal = any_perpendicular(ca.is_point ? ub : ua);
    }
  }
  return inflate({dist, pa, pb, normal}, ca.radius, cb.radius);
}

bool is_swept(const Primitive& s) {
  return std::holds_alternative<Sphere>(s) || std::holds_alternative<Capsule>(s);
}

bool same_shape(const Primitive& a, const Primitive& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& sa) {
        using T = std::decay_t<decltype(sa)>;
        const T& sb = std::get<T>(b);
        if constexpr (std::is_same_v<T, Sphere>) {
          return sa.radius == sb.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          return sa.half_extents == sb.half_extents;
        } else {
          return sa.radius == sb.radius && sa.half_length == sb.half_length;
        }
      },
      a);
}

CoreSolution solve_cores(const detail::ConvexCore& a, const detail::ConvexCore& b,
                         bool& intersecting) {
  const detail::GjkResult g = detail::gjk(a, b);
  intersecting = g.intersecting;
  if (!g.intersecting) {
    const Vec3 diff = g.point_a - g.point_b;
    const double n = diff.norm();
    return {g.distance, g.point_a, g.point_b, n > 0.0 ? Vec3(diff / n) : Vec3::UnitX()};
  }
  const detail::EpaResult e = detail::epa(a, b, g);
  return {-e.depth, e.point_a, e.point_b, e.normal};
}

DistanceResult ordered_distance(const Primitive& a, const Pose& pose_a, const Primitive& b,
                                const Pose& pose_b) {
  if (is_swept(a) && is_swept(b)) return swept_distance(a, pose_a, b, pose_b);

  const bool cylinder = std::holds_alternative<Cylinder>(a) || std::holds_alternative<Cylinder>(b);
  detail::ConvexCore core_a = detail::make_core(a, pose_a, true);
  detail::ConvexCore core_b = detail::make_core(b, pose_b, true);
  bool intersecting = false;
  CoreSolution core = solve_cores(core_a, core_b, intersecting);
  if (!intersecting || !cylinder) return inflate(core, core_a.margin, core_b.margin);

  // Penetrating cylinder: measure against the enclosing capsule instead.
  DistanceResult r;
  const Primitive cap_a = std::holds_alternative<Cylinder>(a)
                              ? Primitive(Capsule{std::get<Cylinder>(a).radius,
                                                  std::get<Cylinder>(a).half_length})
                              : a;
  const Primitive cap_b = std::holds_alternative<Cylinder>(b)
                              ? Primitive(Capsule{std::get<Cylinder>(b).radius,
                                                  std::get<Cylinder>(b).half_length})
                              : b;
  if (is_swept(cap_a) && is_swept(cap_b)) {
    r = swept_distance(cap_a, pose_a, cap_b, pose_b);
  } else {
    core_a = detail::make_core(cap_a, pose_a, false);
    core_b = detail::make_core(cap_b, pose_b, false);
    core = solve_cores(core_a, core_b, intersecting);
    r = inflate(core, core_a.margin, core_b.margin);
  }
  r.approximate = true;
  return r;
}

}  // namespace

Pose Pose::from_xyz_rpy(const Vec3& xyz, const Vec3& rpy) {
  const Quat q = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                 Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                 Eigen::AngleAxisd(rpy.x(), Vec3::UnitX());
  return {xyz, q.normalized()};
}

void validate(const Primitive& shape) {
  const bool ok = std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return positive_finite(s.radius);
        } else if constexpr (std::is_same_v<T, Box>) {
          return positive_finite(s.half_extents.x()) && positive_finite(s.half_extents.y()) &&
                 positive_finite(s.half_extents.z());
        } else {
          return positive_finite(s.radius) && positive_finite(s.half_length);
        }
      },
      shape);
  if (!ok)
    throw GeometryError(std::string(shape_name(shape)) + ": dimensions must be positive");
}

std::string_view shape_name(const Primitive& shape) {
  static constexpr std::string_view names[] = {"sphere", "box", "cylinder", "capsule"};
  return names[shape.index()];
}

double Aabb::distance(const Aabb& other) const {
  const Vec3 gap = (other.min - max).cwiseMax(min - other.max).cwiseMax(0.0);
  return gap.norm();
}

bool Aabb::overlaps(const Aabb& other) const {
  return (min.array() <= other.max.array()).all() && (other.min.array() <= max.array()).all();
}

Vec3 support_point(const Primitive& shape, const Pose& pose, const Vec3& direction) {
  const double len = direction.norm();
  if (!(len > 1e-12)) throw GeometryError("degenerate direction");
  const Vec3 unit = direction / len;
  const detail::ConvexCore core = detail::make_core(shape, pose, true);
  return core.support(unit) + core.margin * unit;
}

DistanceResult pair_distance(const Primitive& a, const Pose& pose_a, const Primitive& b,
                             const Pose& pose_b) {
  validate(a);
  validate(b);
  if (!pose_a.is_normalized() || !pose_b.is_normalized())
    throw GeometryError("pose rotation is not a unit quaternion");
  if (same_shape(a, b) && (pose_a.translation - pose_b.translation).norm() <= kDegenerate &&
      pose_a.rotation.angularDistance(pose_b.rotation) <= kDegenerate)
    throw GeometryError("degenerate normal");

  // Canonical argument order keeps the result symmetric under swapping.
  if (a.index() > b.index()) {
    DistanceResult r = ordered_distance(b, pose_b, a, pose_a);
    std::swap(r.point_a, r.point_b);
    r.normal = -r.normal;
    return r;
  }
  return ordered_distance(a, pose_a, b, pose_b);
}

Aabb aabb_of(const Primitive& shape, const Pose& pose) {
  const Vec3 c = pose.translation;
  const Mat3 rot = pose.rotation_matrix();
  Vec3 ext = std::visit(
      [&](const auto& s) -> Vec3 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return Vec3::Constant(s.radius);
        } else if constexpr (std::is_same_v<T, Box>) {
          return rot.cwiseAbs() * s.half_extents;
        } else if constexpr (std::is_same_v<T, Capsule>) {
          return s.half_length * rot.col(2).cwiseAbs() + Vec3::Constant(s.radius);
        } else {
          const Vec3 axis = rot.col(2);
          Vec3 e;
          for (int i = 0; i < 3; ++i)
            e[i] = s.half_length * std::abs(axis[i]) +
                   s.radius * std::sqrt(std::max(0.0, 1.0 - axis[i] * axis[i]));
          return e;
        }
      },
      shape);
  return {c - ext, c + ext};
}

}  // namespace wbmpc
