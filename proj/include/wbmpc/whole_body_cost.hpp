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

#include <memory>
#include <string_view>
#include <vector>

#include "wbmpc/broadphase.hpp"
#include "wbmpc/collision_model.hpp"
#include "wbmpc/esdf.hpp"
#include "wbmpc/ocp.hpp"
#include "wbmpc/penalty.hpp"
#include "wbmpc/self_collision.hpp"

namespace wbmpc {

enum class EnvMode { Off, Esdf, Primitives };
EnvMode parse_env_mode(std::string_view name);

/// End-effector target switched on at `t`.
struct EeWaypoint {
  double t;
  Vec3 position;
};

struct CostSpec {
  Mat3 Q_ee = 100.0 * Mat3::Identity();
  MatrixXd Q_r;  // tangent size
  MatrixXd R;    // input size
  bool alpha1 = true;
  bool alpha2 = true;
  double terminal_weight = 1.0;
  /// Collision penalties at the last node are scaled like one interval.
  double terminal_collision_weight = 0.05;
  std::vector<EeWaypoint> ee_reference;  // sorted by time; empty disables the term
  Configuration x_ref;
  VectorXd u_ref;

  bool self_enabled = false;
  SelfCollisionConfig self;
  RbfParams self_rbf{1e-2, 1e-3};

  EnvMode env = EnvMode::Off;
  RbfParams env_rbf{0.5, 0.02};
  double env_epsilon = 0.0;  // extra clearance for the primitives-vs-occupancy term

  Vec3 ee_target(double t) const;
  void validate(const RobotModel& robot) const;
};

/// Stage and terminal cost of the whole-body problem. The robot, collision
/// model and sphere set must outlive the cost; the environment snapshot is
/// held by shared pointer and can be swapped between solves.
class WholeBodyCost final : public CostFunction {
 public:
  /// `collision` feeds the self-collision term, `spheres` the ESDF term and
  /// `env_bodies` the primitives-vs-occupancy term; unused ones may be null.
  WholeBodyCost(const RobotModel& robot, CostSpec spec, const CollisionModelSpec* collision,
                const SphereSet* spheres, const std::vector<SphereSource>* env_bodies = nullptr);

  void set_environment(std::shared_ptr<const EsdfGrid> esdf);
  const EsdfGrid* environment() const { return esdf_.get(); }
  const CostSpec& spec() const { return spec_; }

  StageCost stage(double t, double dt, const VectorXd& x, const VectorXd& u,
                  bool derivatives) const override;
  StageCost terminal(double t, const VectorXd& x, bool derivatives) const override;

  /// Collision constraints at x (h values; gradients when requested).
  std::vector<ConstraintEval> self_constraints(const FrameSet& frames, bool derivatives) const;
  std::vector<ConstraintEval> env_constraints(const FrameSet& frames, bool derivatives,
                                              int* outside = nullptr) const;

 private:
  void add_state_terms(double t, double weight, const Configuration& q, const FrameSet& frames,
                       bool derivatives, StageCost& c) const;
  void add_collision_terms(const FrameSet& frames, double weight, bool derivatives,
                           StageCost& c) const;

  const RobotModel& robot_;
  CostSpec spec_;
  const CollisionModelSpec* collision_;
  const SphereSet* spheres_;
  const std::vector<SphereSource>* env_bodies_;
  std::shared_ptr<const EsdfGrid> esdf_;
  // Occupied voxels as boxes for the primitives-vs-occupancy term.
  std::vector<Aabb> voxel_boxes_;
  AabbTree voxel_tree_;
};

}  // namespace wbmpc
