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
#include "wbmpc/collision_model.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "json_util.hpp"

namespace wbmpc {

using nlohmann::json;

Primitive primitive_from_json(const json& shape, const std::string& ctx) {
  const std::string type = json_util::get<std::string>(shape, "type", ctx);
  Primitive out;
  if (type == "sphere") {
    out = Sphere{json_util::get<double>(shape, "radius", ctx)};
  } else if (type == "box") {
    out = Box{json_util::vec3(json_util::require(shape, "half_extents", ctx), ctx + ".half_extents")};
  } else if (type == "cylinder") {
    out = Cylinder{json_util::get<double>(shape, "radius", ctx),
                   json_util::get<double>(shape, "half_length", ctx)};
  } else if (type == "capsule") {
    out = Capsule{json_util::get<double>(shape, "radius", ctx),
                  json_util::get<double>(shape, "half_length", ctx)};
  } else {
    throw ModelError(ctx + ": unknown shape type '" + type + "'");
  }
  try {
    validate(out);
  } catch (const GeometryError& e) {
    throw ModelError(ctx + ": " + e.what());
  }
  return out;
}

json primitive_to_json(const Primitive& shape) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {{"type", "sphere"}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"type", "box"}, {"half_extents", json_util::to_json(s.half_extents)}};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return {{"type", "cylinder"}, {"radius", s.radius}, {"half_length", s.half_length}};
        } else {
          return {{"type", "capsule"}, {"radius", s.radius}, {"half_length", s.half_length}};
        }
      },
      shape);
}

namespace {

int resolve_link(const RobotModel& robot, const json& entry, const std::string& ctx) {
  const std::string link = json_util::get<std::string>(entry, "link", ctx);
  if (!robot.has_link(link)) throw ModelError(ctx + ": unknown link '" + link + "'");
  return robot.link_index(link);
}

Pose origin_of(const json& entry, const std::string& ctx) {
  return entry.contains("origin") ? json_util::pose(entry.at("origin"), ctx + ".origin") : Pose();
}

}  // namespace

CollisionModelSpec CollisionModelSpec::from_json(const json& document, const RobotModel& robot) {
  const json& doc = document.contains("collision") ? document.at("collision") : document;
  CollisionModelSpec spec;

  for (const auto& entry : json_util::require(doc, "bodies", "collision")) {
    AttachedPrimitive body;
    body.name = json_util::get<std::string>(entry, "name", "collision.bodies[]");
    const std::string ctx = "collision.bodies['" + body.name + "']";
    if (spec.body_index_or(body.name) >= 0) throw ModelError("duplicate body name '" + body.name + "'");
    body.link = resolve_link(robot, entry, ctx);
    body.local_pose = origin_of(entry, ctx);
    body.shape = primitive_from_json(json_util::require(entry, "shape", ctx), ctx + ".shape");
    const std::string group = json_util::get_or<std::string>(entry, "group", "base", ctx);
    if (group == "arm") {
      body.group = BodyGroup::Arm;
    } else if (group == "base") {
      body.group = BodyGroup::Base;
    } else {
      throw ModelError(ctx + ": field 'group' must be 'arm' or 'base'");
    }
    const int index = static_cast<int>(spec.bodies_.size());
    (body.group == BodyGroup::Arm ? spec.arm_ : spec.base_).push_back(index);
    spec.bodies_.push_back(std::move(body));
  }

  std::vector<CollisionPair> pairs;
  if (doc.contains("pairs")) {
    const json& p = doc.at("pairs");
    if (p.is_string()) {
      if (p.get<std::string>() != "arm_x_base")
        throw ModelError("collision.pairs: unknown pair rule '" + p.get<std::string>() + "'");
      for (int a : spec.arm_)
        for (int b : spec.base_) pairs.push_back({a, b});
    } else if (p.is_array()) {
      for (const auto& pair : p) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
          throw ModelError("collision.pairs: each pair must be [body, body]");
        const std::string a = pair[0].get<std::string>(), b = pair[1].get<std::string>();
        const int ia = spec.body_index_or(a), ib = spec.body_index_or(b);
        if (ia < 0) throw ModelError("collision.pairs: unknown body '" + a + "'");
        if (ib < 0) throw ModelError("collision.pairs: unknown body '" + b + "'");
        pairs.push_back({ia, ib});
      }
    } else {
      throw ModelError("collision.pairs: expected a list of pairs or \"arm_x_base\"");
    }
  }
  spec.set_pairs(std::move(pairs));

  if (doc.contains("spheres")) {
    for (const auto& entry : doc.at("spheres")) {
      SphereSource src;
      src.delta_max = json_util::get<double>(entry, "delta_max", "collision.spheres[]");
      if (!(src.delta_max > 0.0)) throw ModelError("collision.spheres[]: field 'delta_max' must be > 0");
      if (entry.contains("body")) {
        const std::string name = json_util::get<std::string>(entry, "body", "collision.spheres[]");
        const int b = spec.body_index_or(name);
        if (b < 0) throw ModelError("collision.spheres[]: unknown body '" + name + "'");
        const AttachedPrimitive& body = spec.bodies_[b];
        src.name = json_util::get_or<std::string>(entry, "name", name, "collision.spheres[]");
        src.link = body.link;
        src.local_pose = body.local_pose;
        src.shape = body.shape;
      } else {
        src.name = json_util::get<std::string>(entry, "name", "collision.spheres[]");
        const std::string ctx = "collision.spheres['" + src.name + "']";
        src.link = resolve_link(robot, entry, ctx);
        src.local_pose = origin_of(entry, ctx);
        src.shape = primitive_from_json(json_util::require(entry, "shape", ctx), ctx + ".shape");
      }
      spec.sphere_sources_.push_back(std::move(src));
    }
  }
  return spec;
}

CollisionModelSpec CollisionModelSpec::load(const std::filesystem::path& path,
                                            const RobotModel& robot) {
  return from_json(json_util::read_file(path), robot);
}

int CollisionModelSpec::body_index_or(std::string_view name) const {
  for (int i = 0; i < static_cast<int>(bodies_.size()); ++i)
    if (bodies_[i].name == name) return i;
  return -1;
}

int CollisionModelSpec::body_index(std::string_view name) const {
  const int i = body_index_or(name);
  if (i < 0) throw ModelError("unknown collision body '" + std::string(name) + "'");
  return i;
}

void CollisionModelSpec::set_pairs(std::vector<CollisionPair> pairs) {
  const int n = static_cast<int>(bodies_.size());
  std::set<std::pair<int, int>> seen;
  for (const auto& p : pairs) {
    if (p.a < 0 || p.a >= n || p.b < 0 || p.b >= n)
      throw ModelError("collision pair references a missing body");
    if (p.a == p.b) throw ModelError("collision pair (" + bodies_[p.a].name + ", itself)");
    if (!seen.insert({std::min(p.a, p.b), std::max(p.a, p.b)}).second)
      throw ModelError("duplicate collision pair (" + bodies_[p.a].name + ", " + bodies_[p.b].name + ")");
  }
  pairs_ = std::move(pairs);
}

namespace {

Decomposition decompose_box(const Box& box, double delta_max) {
  const Vec3& h = box.half_extents;
  // Cubic cells of half-size c protrude by c(sqrt(3) - 1); that bounds the search.
  const double c_star = delta_max / (std::sqrt(3.0) - 1.0);
  int limit[3];
  for (int i = 0; i < 3; ++i) limit[i] = static_cast<int>(std::ceil(h[i] / c_star)) + 1;

  long best_count = std::numeric_limits<long>::max();
  double best_radius = std::numeric_limits<double>::infinity();
  Eigen::Vector3i best_n(1, 1, 1);
  double best_protrusion = 0.0;
  for (int nx = 1; nx <= limit[0]; ++nx) {
    for (int ny = 1; ny <= limit[1]; ++ny) {
      for (int nz = 1; nz <= limit[2]; ++nz) {
        const long count = static_cast<long>(nx) * ny * nz;
        if (count > best_count) break;
        const Vec3 cell(h.x() / nx, h.y() / ny, h.z() / nz);
        const double radius = cell.norm();
        const double protrusion = radius - cell.minCoeff();
        if (protrusion > delta_max) continue;
        if (count < best_count || (count == best_count && radius < best_radius)) {
          best_count = count;
          best_radius = radius;
          best_n = {nx, ny, nz};
          best_protrusion = protrusion;
        }
      }
    }
  }
  Decomposition out;
  out.protrusion = best_protrusion;
  const Vec3 cell(h.x() / best_n.x(), h.y() / best_n.y(), h.z() / best_n.z());
  for (int i = 0; i < best_n.x(); ++i)
    for (int j = 0; j < best_n.y(); ++j)
      for (int k = 0; k < best_n.z(); ++k) {
        const Vec3 center = -h + Vec3((2 * i + 1) * cell.x(), (2 * j + 1) * cell.y(),
                                      (2 * k + 1) * cell.z());
        out.spheres.push_back({center, best_radius});
      }
  return out;
}

Decomposition decompose_cylinder(const Cylinder& cyl, double delta_max) {
  const double r = cyl.radius, hl = cyl.half_length;
  // Protrusion sqrt(r^2 + s^2) - min(r, s) falls until the half-spacing s
  // reaches r, then rises again; the best achievable value is r(sqrt(2) - 1).
  const int k_max = static_cast<int>(std::ceil(hl / r)) + 1;
  for (int k = 1; k <= k_max; ++k) {
    const double s = hl / k;
    const double radius = std::sqrt(r * r + s * s);
    const double protrusion = radius - std::min(r, s);
    if (protrusion > delta_max) continue;
    Decomposition out;
    out.protrusion = protrusion;
    for (int j = 0; j < k; ++j) out.spheres.push_back({Vec3(0.0, 0.0, -hl + (2 * j + 1) * s), radius});
    return out;
  }
  throw GeometryError("cylinder of radius " + std::to_string(r) +
                      " cannot be covered with protrusion <= " + std::to_string(delta_max));
}

}  // namespace

Decomposition decompose_primitive(const Primitive& shape, double delta_max) {
  if (!(delta_max > 0.0)) throw GeometryError("delta_max must be positive");
  validate(shape);
  if (const auto* s = std::get_if<Sphere>(&shape)) return {{{Vec3::Zero(), s->radius}}, 0.0};
  if (const auto* b = std::get_if<Box>(&shape)) return decompose_box(*b, delta_max);
  if (const auto* c = std::get_if<Cylinder>(&shape)) return decompose_cylinder(*c, delta_max);
  throw GeometryError("unsupported shape for sphere decomposition: " +
                      std::string(shape_name(shape)));
}

SphereSet build_sphere_set(const CollisionModelSpec& spec) {
  SphereSet out;
  for (const auto& src : spec.sphere_sources()) {
    for (const auto& s : decompose_primitive(src.shape, src.delta_max).spheres)
      out.push_back({src.link, src.local_pose * s.center, s.radius});
  }
  return out;
}

std::vector<Vec3> sphere_centers_world(const SphereSet& spheres, const FrameSet& frames) {
  std::vector<Vec3> out;
  out.reserve(spheres.size());
  for (const auto& s : spheres) {
    if (s.link < 0 || s.link >= static_cast<int>(frames.world.size()))
      throw ModelError("sphere attached to unknown link " + std::to_string(s.link));
    out.push_back(frames[s.link] * s.local_center);
  }
  return out;
}

std::vector<Pose> body_poses(const CollisionModelSpec& spec, const FrameSet& frames) {
  std::vector<Pose> out;
  out.reserve(spec.bodies().size());
  for (const auto& b : spec.bodies()) out.push_back(frames[b.link] * b.local_pose);
  return out;
}

}  // namespace wbmpc
