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
#include "wbmpc/kinematics.hpp"

#include <cmath>
#include <map>

#include "json_util.hpp"
#include "wbmpc/lie.hpp"

namespace wbmpc {

namespace {

JointType parse_joint_type(const std::string& s, const std::string& link) {
  if (s == "fixed") return JointType::Fixed;
  if (s == "revolute") return JointType::Revolute;
  if (s == "prismatic") return JointType::Prismatic;
  if (s == "floating") return JointType::Floating;
  throw ModelError("link '" + link + "': unknown joint type '" + s + "'");
}

}  // namespace

RobotModel RobotModel::from_json(const nlohmann::json& doc) {
  using json_util::require;
  const auto& links = require(doc, "links", "robot");
  if (!links.is_array() || links.empty()) throw ModelError("robot: 'links' must be a non-empty array");

  struct Raw {
    std::string name;
    std::string parent;
    bool has_parent;
    Joint joint;
  };
  std::vector<Raw> raw;
  std::map<std::string, int> by_name;
  for (const auto& entry : links) {
    Raw r;
    r.name = json_util::get<std::string>(entry, "name", "robot.links[]");
    const std::string ctx = "robot.links['" + r.name + "']";
    if (by_name.count(r.name)) throw ModelError("duplicate link name '" + r.name + "'");
    r.has_parent = entry.contains("parent") && !entry.at("parent").is_null();
    if (r.has_parent) r.parent = json_util::get<std::string>(entry, "parent", ctx);
    if (r.has_parent && r.parent == r.name) throw ModelError("cycle detected at link '" + r.name + "'");
    const auto& j = require(entry, "joint", ctx);
    r.joint.type = parse_joint_type(json_util::get<std::string>(j, "type", ctx + ".joint"), r.name);
    if (j.contains("axis")) r.joint.axis = json_util::vec3(j.at("axis"), ctx + ".joint.axis");
    if (j.contains("origin")) r.joint.origin = json_util::pose(j.at("origin"), ctx + ".joint.origin");
    const bool movable = r.joint.type == JointType::Revolute || r.joint.type == JointType::Prismatic;
    if (movable) {
      const double n = r.joint.axis.norm();
      if (!(n > 1e-12)) throw ModelError(ctx + ": joint axis must be non-zero");
      r.joint.axis /= n;
    }
    by_name[r.name] = static_cast<int>(raw.size());
    raw.push_back(std::move(r));
  }

  int root = -1;
  for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
    const Raw& r = raw[i];
    if (!r.has_parent) {
      if (root >= 0) throw ModelError("robot: more than one root link");
      if (r.joint.type != JointType::Floating)
        throw ModelError("robot: root link '" + r.name + "' must have a floating joint");
      root = i;
    } else {
      if (!by_name.count(r.parent))
        throw ModelError("unknown parent '" + r.parent + "' of link '" + r.name + "'");
      if (r.joint.type == JointType::Floating)
        throw ModelError("robot: only the root may have a floating joint ('" + r.name + "')");
    }
  }
  if (root < 0) throw ModelError("cycle detected: no root link");

  // Breadth-first from the root; anything unreached sits on a cycle.
  std::vector<std::vector<int>> children(raw.size());
  for (int i = 0; i < static_cast<int>(raw.size()); ++i)
    if (raw[i].has_parent) children[by_name.at(raw[i].parent)].push_back(i);
  std::vector<int> order{root};
  for (std::size_t k = 0; k < order.size(); ++k)
    for (int c : children[order[k]]) order.push_back(c);
  if (order.size() != raw.size()) throw ModelError("cycle detected in link tree");

  RobotModel model;
  std::vector<int> new_index(raw.size());
  for (int k = 0; k < static_cast<int>(order.size()); ++k) new_index[order[k]] = k;
  for (int old : order) {
    Link l;
    l.name = raw[old].name;
    l.parent = raw[old].has_parent ? new_index[by_name.at(raw[old].parent)] : -1;
    l.joint = raw[old].joint;
    if (l.joint.type == JointType::Revolute || l.joint.type == JointType::Prismatic)
      l.dof = model.num_joints_++;
    model.links_.push_back(std::move(l));
  }
  model.chains_.resize(model.links_.size());
  for (int i = 0; i < model.num_links(); ++i) {
    std::vector<int> chain;
    for (int l = i; l >= 0; l = model.links_[l].parent) chain.push_back(l);
    model.chains_[i].assign(chain.rbegin(), chain.rend());
  }
  const std::string ee = json_util::get<std::string>(doc, "end_effector", "robot");
  model.end_effector_ = model.link_index(ee);
  return model;
}

RobotModel RobotModel::load(const std::filesystem::path& path) {
  return from_json(json_util::read_file(path));
}

int RobotModel::link_index(std::string_view name) const {
  for (int i = 0; i < num_links(); ++i)
    if (links_[i].name == name) return i;
  throw ModelError("unknown link '" + std::string(name) + "'");
}

bool RobotModel::has_link(std::string_view name) const {
  for (const auto& l : links_)
    if (l.name == name) return true;
  return false;
}

Configuration retract(const Configuration& q, const VectorXd& delta) {
  Configuration out;
  out.base.translation = q.base.translation + delta.head<3>();
  out.base.rotation = (q.base.rotation * so3::exp(delta.segment<3>(3))).normalized();
  out.joints = q.joints + delta.tail(delta.size() - 6);
  return out;
}

VectorXd difference(const Configuration& from, const Configuration& to) {
  VectorXd d(6 + from.joints.size());
  d.head<3>() = to.base.translation - from.base.translation;
  d.segment<3>(3) = so3::log(from.base.rotation.conjugate() * to.base.rotation);
  d.tail(from.joints.size()) = to.joints - from.joints;
  return d;
}

double configuration_distance(const Configuration& a, const Configuration& b) {
  const double t = (a.base.translation - b.base.translation).squaredNorm();
  const double angle = a.base.rotation.angularDistance(b.base.rotation);
  return std::sqrt(t + angle * angle + (a.joints - b.joints).squaredNorm());
}

FrameSet forward_kinematics(const RobotModel& model, const Configuration& q) {
  if (q.joints.size() != model.num_joints())
    throw DimensionError("configuration has " + std::to_string(q.joints.size()) +
                         " joint values, model expects " + std::to_string(model.num_joints()));
  FrameSet frames;
  frames.world.resize(model.num_links());
  for (int i = 0; i < model.num_links(); ++i) {
    const Link& l = model.link(i);
    if (l.parent < 0) {
      frames.world[i] = q.base;
      continue;
    }
    Pose joint_frame = frames.world[l.parent] * l.joint.origin;
    if (l.joint.type == JointType::Revolute) {
      joint_frame.rotation =
          joint_frame.rotation * Quat(Eigen::AngleAxisd(q.joints[l.dof], l.joint.axis));
    } else if (l.joint.type == JointType::Prismatic) {
      joint_frame.translation += joint_frame.rotation * (l.joint.axis * q.joints[l.dof]);
    }
    frames.world[i] = joint_frame;
  }
  return frames;
}

PointJacobian point_jacobian_world(const RobotModel& model, const FrameSet& frames, int link,
                                   const Vec3& p) {
  PointJacobian jac = PointJacobian::Zero(3, model.tangent_size());
  const Pose& base = frames.world[0];
  jac.leftCols<3>().setIdentity();
  jac.middleCols<3>(3) = -so3::hat(p - base.translation) * base.rotation_matrix();
  for (int l : model.chain(link)) {
    const Link& lk = model.link(l);
    if (lk.dof < 0) continue;
    const Vec3 axis = frames.world[l].rotation * lk.joint.axis;
    if (lk.joint.type == JointType::Revolute) {
      jac.col(6 + lk.dof) = axis.cross(p - frames.world[l].translation);
    } else {
      jac.col(6 + lk.dof) = axis;
    }
  }
  return jac;
}

PointJacobian point_jacobian(const RobotModel& model, const Configuration& q,
                             std::string_view link, const Vec3& local_point) {
  const int idx = model.link_index(link);
  const FrameSet frames = forward_kinematics(model, q);
  return point_jacobian_world(model, frames, idx, frames[idx] * local_point);
}

}  // namespace wbmpc
