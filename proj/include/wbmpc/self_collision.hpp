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
#include <vector>

#include "wbmpc/broadphase.hpp"
#include "wbmpc/collision_model.hpp"
#include "wbmpc/kinematics.hpp"
#include "wbmpc/penalty.hpp"

namespace wbmpc {

enum class SelfStrategy { Naive, Broadphase };

SelfStrategy parse_self_strategy(std::string_view name);

struct SelfCollisionConfig {
  double epsilon = 0.1;
  SelfStrategy strategy = SelfStrategy::Naive;
  bool with_gradient = true;
};

/// One constraint per listed pair, h = d - epsilon.
std::vector<ConstraintEval> evaluate_naive(const RobotModel& robot, const CollisionModelSpec& spec,
                                           const FrameSet& frames, double epsilon = 0.1,
                                           bool with_gradient = true);

/// One constraint per arm body against its nearest base body, found through
/// an AABB tree rebuilt from the current base-body poses.
std::vector<ConstraintEval> evaluate_broadphase(const RobotModel& robot,
                                                const CollisionModelSpec& spec,
                                                const FrameSet& frames, double epsilon = 0.1,
                                                bool with_gradient = true,
                                                std::vector<AabbTree::Trace>* traces = nullptr);

std::vector<ConstraintEval> evaluate_self(const RobotModel& robot, const CollisionModelSpec& spec,
                                          const FrameSet& frames, const SelfCollisionConfig& cfg);

/// Convenience overloads running forward kinematics first.
std::vector<ConstraintEval> evaluate_naive(const RobotModel& robot, const CollisionModelSpec& spec,
                                           const Configuration& q, double epsilon = 0.1);
std::vector<ConstraintEval> evaluate_broadphase(const RobotModel& robot,
                                                const CollisionModelSpec& spec,
                                                const Configuration& q, double epsilon = 0.1);

/// Gradient of the signed distance between a point pair on two links, along
/// the normal pointing from B to A.
VectorXd distance_gradient(const RobotModel& robot, const FrameSet& frames, int link_a,
                           const Vec3& point_a, int link_b, const Vec3& point_b,
                           const Vec3& normal);

}  // namespace wbmpc
