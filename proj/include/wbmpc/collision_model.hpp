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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wbmpc/geometry.hpp"
#include "wbmpc/kinematics.hpp"

namespace wbmpc {

enum class BodyGroup { Arm, Base };

struct AttachedPrimitive {
  std::string name;
  int link = 0;
  Pose local_pose;
  Primitive shape = Sphere{0.1};
  BodyGroup group = BodyGroup::Base;
};

/// Indices into CollisionModelSpec::bodies().
struct CollisionPair {
  int a;
  int b;
};

struct LocalSphere {
  Vec3 center;
  double radius;
};

struct Decomposition {
  std::vector<LocalSphere> spheres;
  /// Worst-case distance from a sphere surface point to the shape.
  double protrusion = 0.0;
};

struct AttachedSphere {
  int link;
  Vec3 local_center;
  double radius;
};
using SphereSet = std::vector<AttachedSphere>;

/// A body to be covered by spheres for the environment constraints.
struct SphereSource {
  std::string name;
  int link = 0;
  Pose local_pose;
  Primitive shape = Sphere{0.1};
  double delta_max = 0.1;
};

Primitive primitive_from_json(const nlohmann::json& shape, const std::string& context);
nlohmann::json primitive_to_json(const Primitive& shape);

class CollisionModelSpec {
 public:
  /// Reads the "collision" member when present, otherwise the document itself.
  static CollisionModelSpec from_json(const nlohmann::json& document, const RobotModel& robot);
  static CollisionModelSpec load(const std::filesystem::path& path, const RobotModel& robot);

  const std::vector<AttachedPrimitive>& bodies() const { return bodies_; }
  const std::vector<CollisionPair>& pairs() const { return pairs_; }
  const std::vector<SphereSource>& sphere_sources() const { return sphere_sources_; }
  const std::vector<int>& arm_bodies() const { return arm_; }
  const std::vector<int>& base_bodies() const { return base_; }
  int body_index(std::string_view name) const;  // throws ModelError
  int body_index_or(std::string_view name) const;  // -1 when absent

  void set_pairs(std::vector<CollisionPair> pairs);

 private:
  std::vector<AttachedPrimitive> bodies_;
  std::vector<CollisionPair> pairs_;
  std::vector<SphereSource> sphere_sources_;
  std::vector<int> arm_;
  std::vector<int> base_;
};

/// Equal-radius spheres in the primitive's local frame covering its volume,
/// each protruding at most `delta_max` beyond its surface. Supports spheres,
/// boxes and cylinders; a cylinder with radius above delta_max / (sqrt(2) - 1)
/// cannot meet the bound and is rejected.
Decomposition decompose_primitive(const Primitive& shape, double delta_max);

/// Decomposes every sphere source and expresses the result in link frames.
SphereSet build_sphere_set(const CollisionModelSpec& spec);

std::vector<Vec3> sphere_centers_world(const SphereSet& spheres, const FrameSet& frames);

/// World pose of every body, indexed like spec.bodies().
std::vector<Pose> body_poses(const CollisionModelSpec& spec, const FrameSet& frames);

}  // namespace wbmpc
