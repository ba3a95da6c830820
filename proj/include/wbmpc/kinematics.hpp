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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wbmpc/common.hpp"
#include "wbmpc/geometry.hpp"

namespace wbmpc {

enum class JointType { Fixed, Revolute, Prismatic, Floating };

struct Joint {
  JointType type = JointType::Fixed;
  Vec3 axis = Vec3::UnitZ();
  Pose origin;  // placement of the joint frame in the parent link frame
};

struct Link {
  std::string name;
  int parent = -1;  // index into RobotModel::links(), -1 for the root
  Joint joint;
  int dof = -1;  // index into Configuration::joints for movable joints
};

/// Floating-base kinematic tree. Links are stored in topological order
/// (parents before children); the root carries the floating joint.
class RobotModel {
 public:
  static RobotModel from_json(const nlohmann::json& document);
  static RobotModel load(const std::filesystem::path& path);

  std::span<const Link> links() const { return links_; }
  const Link& link(int index) const { return links_.at(index); }
  int link_index(std::string_view name) const;  // throws ModelError
  bool has_link(std::string_view name) const;
  int num_links() const { return static_cast<int>(links_.size()); }
  /// Number of movable (revolute or prismatic) joints.
  int num_joints() const { return num_joints_; }
  /// Base twist plus joint rates.
  int tangent_size() const { return 6 + num_joints_; }
  int end_effector() const { return end_effector_; }
  /// Indices of the links from the root down to `link`, root first.
  const std::vector<int>& chain(int link) const { return chains_.at(link); }

 private:
  std::vector<Link> links_;
  std::vector<std::vector<int>> chains_;
  int num_joints_ = 0;
  int end_effector_ = 0;
};

struct Configuration {
  Pose base;
  VectorXd joints;

  static Configuration zero(const RobotModel& model) {
    return {Pose(), VectorXd::Zero(model.num_joints())};
  }
};

/// Tangent update: world-frame translation, body-frame rotation, joint offsets.
Configuration retract(const Configuration& q, const VectorXd& delta);
/// Tangent vector taking `from` to `to`, i.e. retract(from, difference(from, to)) == to.
VectorXd difference(const Configuration& from, const Configuration& to);
/// Euclidean translation/joint distance combined with the quaternion geodesic angle.
double configuration_distance(const Configuration& a, const Configuration& b);

/// World pose of every link, indexed like RobotModel::links().
struct FrameSet {
  std::vector<Pose> world;
  const Pose& operator[](int link) const { return world[link]; }
};

FrameSet forward_kinematics(const RobotModel& model, const Configuration& q);

using PointJacobian = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Linear-velocity Jacobian of a point fixed to `link`, columns ordered as
/// (base linear velocity in world, base angular velocity in body, joint rates).
PointJacobian point_jacobian(const RobotModel& model, const Configuration& q,
                             std::string_view link, const Vec3& local_point);
/// Same, for a world-frame point rigidly attached to `link` at the given frames.
PointJacobian point_jacobian_world(const RobotModel& model, const FrameSet& frames, int link,
                                   const Vec3& world_point);

}  // namespace wbmpc
