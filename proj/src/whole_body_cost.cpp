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
#include "wbmpc/whole_body_cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "wbmpc/lie.hpp"

namespace wbmpc {

EnvMode parse_env_mode(std::string_view name) {
  if (name == "off") return EnvMode::Off;
  if (name == "esdf") return EnvMode::Esdf;
  if (name == "primitives") return EnvMode::Primitives;
  throw ModelError("unknown environment mode '" + std::string(name) + "'");
}

Vec3 CostSpec::ee_target(double t) const {
  Vec3 target = ee_reference.front().position;
  for (const auto& w : ee_reference)
    if (w.t <= t) target = w.position;
  return target;
}

void CostSpec::validate(const RobotModel& robot) const {
  const int nt = robot.tangent_size();
  if (Q_r.rows() != nt || Q_r.cols() != nt) throw DimensionError("Q_r must be " + std::to_string(nt) + " square");
  if (R.rows() != nt || R.cols() != nt) throw DimensionError("R must be " + std::to_string(nt) + " square");
  if (u_ref.size() != nt) throw DimensionError("u_ref must have " + std::to_string(nt) + " entries");
  if (x_ref.joints.size() != robot.num_joints()) throw DimensionError("x_ref joint count mismatch");
  if (Eigen::LLT<MatrixXd>(0.5 * (R + R.transpose())).info() != Eigen::Success)
    throw ModelError("R must be positive definite");
  auto psd = [](const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff() >= -1e-12;
  };
  if (!psd(Q_r) || !psd(Q_ee)) throw ModelError("Q_r and Q_ee must be positive semi-definite");
  if (alpha1 && ee_reference.empty()) throw ModelError("end-effector term enabled without a target");
}

WholeBodyCost::WholeBodyCost(const RobotModel& robot, CostSpec spec,
                             const CollisionModelSpec* collision, const SphereSet* spheres,
                             const std::vector<SphereSource>* env_bodies)
    : robot_(robot), spec_(std::move(spec)), collision_(collision), spheres_(spheres),
      env_bodies_(env_bodies) {
  spec_.validate(robot_);
  if (spec_.self_enabled && !collision_) throw ModelError("self-collision term needs a collision model");
  if (spec_.env == EnvMode::Esdf && !spheres_) throw ModelError("ESDF term needs a sphere set");
  if (spec_.env == EnvMode::Primitives && !env_bodies_)
    throw ModelError("primitive environment term needs a body list");
}

void WholeBodyCost::set_environment(std::shared_ptr<const EsdfGrid> esdf) {
  esdf_ = std::move(esdf);
  voxel_boxes_.clear();
  voxel_tree_ = AabbTree();
  if (spec_.env != EnvMode::Primitives || !esdf_) return;
  const GridGeometry& g = esdf_->geometry();
  const Vec3 half = Vec3::Constant(0.5 * g.resolution);
  const auto& occ = esdf_->occupancy().occupied;
  for (std::size_t v = 0; v < occ.size(); ++v) {
    if (!occ[v]) continue;
    const Vec3 c = g.center(v);
    voxel_boxes_.push_back({c - half, c + half});
  }
  voxel_tree_ = AabbTree(voxel_boxes_);
}

std::vector<ConstraintEval> WholeBodyCost::self_constraints(const FrameSet& frames,
                                                            bool derivatives) const {
  SelfCollisionConfig cfg = spec_.self;
  cfg.with_gradient = derivatives;
  return evaluate_self(robot_, *collision_, frames, cfg);
}

std::vector<ConstraintEval> WholeBodyCost::env_constraints(const FrameSet& frames, bool derivatives,
                                                           int* outside) const {
  std::vector<ConstraintEval> out;
  if (!esdf_ || spec_.env == EnvMode::Off) return out;
  const int nt = robot_.tangent_size();
  if (spec_.env == EnvMode::Esdf) {
    const double cap = esdf_->geometry().cap();
    out.reserve(spheres_->size());
    for (std::size_t i = 0; i < spheres_->size(); ++i) {
      const AttachedSphere& s = (*spheres_)[i];
      const Vec3 p = frames[s.link] * s.local_center;
      ConstraintEval c;
      c.id = static_cast<int>(i);
      c.witness_a = p;
      if (esdf_->interpolable(p)) {
        const EsdfSample sample = esdf_->query(p);
        c.h = sample.distance - s.radius;
        c.grad = derivatives
                     ? VectorXd(point_jacobian_world(robot_, frames, s.link, p).transpose() * sample.gradient)
                     : VectorXd::Zero(nt);
      } else {
        // Beyond the mapped volume: nothing is known, so no push either way.
        c.h = cap - s.radius;
        c.grad = VectorXd::Zero(nt);
        if (outside) ++*outside;
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  const auto& sources = *env_bodies_;
  out.reserve(sources.size());
  if (voxel_tree_.empty()) return out;
  const double half = 0.5 * esdf_->geometry().resolution;
  const Box voxel{Vec3::Constant(half)};
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const SphereSource& src = sources[i];
    const Pose pose = frames[src.link] * src.local_pose;
    const auto nearest = voxel_tree_.nearest(aabb_of(src.shape, pose), [&](int item) {
      return pair_distance(src.shape, pose, voxel, Pose(voxel_boxes_[item].center(), Quat::Identity()));
    });
    ConstraintEval c;
    c.id = static_cast<int>(i);
    c.partner = nearest.item;
    c.h = nearest.result.signed_distance - spec_.env_epsilon;
    c.witness_a = nearest.result.point_a;
    c.witness_b = nearest.result.point_b;
    c.approximate = nearest.result.approximate;
    c.grad = derivatives ? VectorXd(point_jacobian_world(robot_, frames, src.link, nearest.result.point_a)
                                        .transpose() *
                                    nearest.result.normal)
                         : VectorXd::Zero(nt);
    out.push_back(std::move(c));
  }
  return out;
}

void WholeBodyCost::add_state_terms(double t, double weight, const Configuration& q,
                                    const FrameSet& frames, bool derivatives, StageCost& c) const {
  if (spec_.alpha1) {
    const int ee = robot_.end_effector();
    const Vec3 p = frames[ee].translation;
    const Vec3 e = p - spec_.ee_target(t);
    c.value += weight * e.dot(spec_.Q_ee * e);
    if (derivatives) {
      const PointJacobian J = point_jacobian_world(robot_, frames, ee, p);
      const MatrixXd QJ = spec_.Q_ee * J;
      c.qx.noalias() += 2.0 * weight * (QJ.transpose() * e);
      c.Qxx.noalias() += 2.0 * weight * (J.transpose() * QJ);
    }
  }
  if (spec_.alpha2) {
    const VectorXd e = difference(spec_.x_ref, q);
    c.value += weight * e.dot(spec_.Q_r * e);
    if (derivatives) {
      // d e / d delta for a body-frame perturbation of q.
      MatrixXd Je = MatrixXd::Identity(e.size(), e.size());
      Je.block<3, 3>(3, 3) = so3::right_jacobian_inverse(e.segment<3>(3));
      const MatrixXd QJ = spec_.Q_r * Je;
      c.qx.noalias() += 2.0 * weight * (QJ.transpose() * e);
      c.Qxx.noalias() += 2.0 * weight * (Je.transpose() * QJ);
    }
  }
}

void WholeBodyCost::add_collision_terms(const FrameSet& frames, double weight, bool derivatives,
                                        StageCost& c) const {
  auto add = [&](const std::vector<ConstraintEval>& cons, const RbfParams& rbf) {
    for (const auto& con : cons) {
      const RbfValue b = rbf_eval(con.h, rbf);
      c.value += weight * b.value;
      if (derivatives) {
        c.qx.noalias() += (weight * b.d1) * con.grad;
        c.Qxx.selfadjointView<Eigen::Lower>().rankUpdate(con.grad, weight * b.d2);
      }
    }
  };
  bool ranked = false;
  if (spec_.self_enabled) {
    const auto cons = self_constraints(frames, derivatives);
    for (const auto& con : cons) c.min_self_h = std::isnan(c.min_self_h) ? con.h : std::min(c.min_self_h, con.h);
    add(cons, spec_.self_rbf);
    ranked = true;
  }
  if (spec_.env != EnvMode::Off && esdf_) {
    const auto cons = env_constraints(frames, derivatives, &c.env_outside);
    for (const auto& con : cons) c.min_env_h = std::isnan(c.min_env_h) ? con.h : std::min(c.min_env_h, con.h);
    add(cons, spec_.env_rbf);
    ranked = true;
  }
  if (derivatives && ranked) {
    // rankUpdate only touched the lower triangle; fold the collision part back in.
    c.Qxx.triangularView<Eigen::StrictlyUpper>() = c.Qxx.transpose();
  }
}

StageCost WholeBodyCost::stage(double t, double dt, const VectorXd& x, const VectorXd& u,
                               bool derivatives) const {
  const int nt = robot_.tangent_size();
  const Configuration q = WholeBodyDynamics::unpack(x);
  const FrameSet frames = forward_kinematics(robot_, q);
  StageCost c;
  if (derivatives) {
    c.qx = VectorXd::Zero(nt);
    c.Qxx = MatrixXd::Zero(nt, nt);
  }
  add_state_terms(t, dt, q, frames, derivatives, c);
  const VectorXd eu = u - spec_.u_ref;
  c.value += dt * eu.dot(spec_.R * eu);
  if (derivatives) {
    c.qu = 2.0 * dt * (spec_.R * eu);
    c.Quu = 2.0 * dt * spec_.R;
    c.Qux = MatrixXd::Zero(nt, nt);
  }
  add_collision_terms(frames, dt, derivatives, c);
  return c;
}

StageCost WholeBodyCost::terminal(double t, const VectorXd& x, bool derivatives) const {
  const int nt = robot_.tangent_size();
  const Configuration q = WholeBodyDynamics::unpack(x);
  const FrameSet frames = forward_kinematics(robot_, q);
  StageCost c;
  if (derivatives) {
    c.qx = VectorXd::Zero(nt);
    c.Qxx = MatrixXd::Zero(nt, nt);
  }
  add_state_terms(t, spec_.terminal_weight, q, frames, derivatives, c);
  add_collision_terms(frames, spec_.terminal_collision_weight, derivatives, c);
  return c;
}

}  // namespace wbmpc
