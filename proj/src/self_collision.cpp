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
#include "wbmpc/self_collision.hpp"

#include <string>

namespace wbmpc {

SelfStrategy parse_self_strategy(std::string_view name) {
  if (name == "naive") return SelfStrategy::Naive;
  if (name == "broadphase") return SelfStrategy::Broadphase;
  throw ModelError("unknown self-collision strategy '" + std::string(name) + "'");
}

VectorXd distance_gradient(const RobotModel& robot, const FrameSet& frames, int link_a,
                           const Vec3& point_a, int link_b, const Vec3& point_b,
                           const Vec3& normal) {
  const PointJacobian ja = point_jacobian_world(robot, frames, link_a, point_a);
  const PointJacobian jb = point_jacobian_world(robot, frames, link_b, point_b);
  return ((ja - jb).transpose() * normal);
}

namespace {

std::string pair_label(const CollisionModelSpec& spec, int a, int b) {
  return "pair (" + spec.bodies()[a].name + ", " + spec.bodies()[b].name + ")";
}

DistanceResult body_distance(const CollisionModelSpec& spec, const std::vector<Pose>& poses,
                             int a, int b) {
  try {
    return pair_distance(spec.bodies()[a].shape, poses[a], spec.bodies()[b].shape, poses[b]);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(pair_label(spec, a, b) + ": " + e.what(), e.lower_bound());
  } catch (const GeometryError& e) {
    throw GeometryError(pair_label(spec, a, b) + ": " + e.what());
  }
}

ConstraintEval make_eval(const RobotModel& robot, const CollisionModelSpec& spec,
                         const FrameSet& frames, int a, int b, const DistanceResult& r,
                         double epsilon, bool with_gradient) {
  ConstraintEval c;
  c.h = r.signed_distance - epsilon;
  c.witness_a = r.point_a;
  c.witness_b = r.point_b;
  c.approximate = r.approximate;
  if (with_gradient) {
    c.grad = distance_gradient(robot, frames, spec.bodies()[a].link, r.point_a,
                               spec.bodies()[b].link, r.point_b, r.normal);
  } else {
    c.grad = VectorXd::Zero(robot.tangent_size());
  }
  return c;
}

}  // namespace

std::vector<ConstraintEval> evaluate_naive(const RobotModel& robot, const CollisionModelSpec& spec,
                                           const FrameSet& frames, double epsilon,
                                           bool with_gradient) {
  const std::vector<Pose> poses = body_poses(spec, frames);
  std::vector<ConstraintEval> out;
  out.reserve(spec.pairs().size());
  for (std::size_t i = 0; i < spec.pairs().size(); ++i) {
    const auto [a, b] = spec.pairs()[i];
    const DistanceResult r = body_distance(spec, poses, a, b);
    ConstraintEval c = make_eval(robot, spec, frames, a, b, r, epsilon, with_gradient);
    c.id = static_cast<int>(i);
    c.partner = b;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ConstraintEval> evaluate_broadphase(const RobotModel& robot,
                                                const CollisionModelSpec& spec,
                                                const FrameSet& frames, double epsilon,
                                                bool with_gradient,
                                                std::vector<AabbTree::Trace>* traces) {
  const auto& base = spec.base_bodies();
  if (base.empty()) throw ModelError("broad-phase evaluation needs at least one base body");
  const std::vector<Pose> poses = body_poses(spec, frames);
  std::vector<Aabb> boxes;
  boxes.reserve(base.size());
  for (int b : base) boxes.push_back(aabb_of(spec.bodies()[b].shape, poses[b]));
  const AabbTree tree(boxes);

  std::vector<ConstraintEval> out;
  out.reserve(spec.arm_bodies().size());
  if (traces) traces->clear();
  for (int a : spec.arm_bodies()) {
    AabbTree::Trace trace;
    const Aabb query = aabb_of(spec.bodies()[a].shape, poses[a]);
    const auto nearest = tree.nearest(
        query, [&](int item) { return body_distance(spec, poses, a, base[item]); },
        traces ? &trace : nullptr);
    const int b = base[nearest.item];
    ConstraintEval c = make_eval(robot, spec, frames, a, b, nearest.result, epsilon, with_gradient);
    c.id = a;
    c.partner = b;
    out.push_back(std::move(c));
    if (traces) traces->push_back(std::move(trace));
  }
  return out;
}

std::vector<ConstraintEval> evaluate_self(const RobotModel& robot, const CollisionModelSpec& spec,
                                          const FrameSet& frames, const SelfCollisionConfig& cfg) {
  if (cfg.strategy == SelfStrategy::Broadphase)
    return evaluate_broadphase(robot, spec, frames, cfg.epsilon, cfg.with_gradient);
  return evaluate_naive(robot, spec, frames, cfg.epsilon, cfg.with_gradient);
}

std::vector<ConstraintEval> evaluate_naive(const RobotModel& robot, const CollisionModelSpec& spec,
                                           const Configuration& q, double epsilon) {
  return evaluate_naive(robot, spec, forward_kinematics(robot, q), epsilon, true);
}

std::vector<ConstraintEval> evaluate_broadphase(const RobotModel& robot,
                                                const CollisionModelSpec& spec,
                                                const Configuration& q, double epsilon) {
  return evaluate_broadphase(robot, spec, forward_kinematics(robot, q), epsilon, true);
}

}  // namespace wbmpc
