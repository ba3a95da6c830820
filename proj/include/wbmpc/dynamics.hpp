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

#include "wbmpc/common.hpp"
#include "wbmpc/kinematics.hpp"

namespace wbmpc {

/// Continuous-time flow on a manifold state. States live in an embedding
/// vector; perturbations and velocities live in the tangent space.
class SystemDynamics {
 public:
  virtual ~SystemDynamics() = default;
  virtual int state_size() const = 0;
  virtual int tangent_size() const = 0;
  virtual int input_size() const = 0;

  /// Tangent-space velocity of the state under input u.
  virtual VectorXd velocity(const VectorXd& x, const VectorXd& u) const = 0;
  virtual VectorXd retract(const VectorXd& x, const VectorXd& delta) const { return x + delta; }
  /// Tangent vector at `from` reaching `to`.
  virtual VectorXd difference(const VectorXd& from, const VectorXd& to) const { return to - from; }

  /// One RK4 step of length h with u held constant.
  VectorXd integrate(const VectorXd& x, const VectorXd& u, double h) const;

  /// Jacobians of integrate() in tangent coordinates; central differences
  /// unless a subclass knows them exactly.
  virtual void linearize(const VectorXd& x, const VectorXd& u, double h, MatrixXd& A,
                         MatrixXd& B) const;
};

/// x' = A x + B u.
class LinearDynamics final : public SystemDynamics {
 public:
  LinearDynamics(MatrixXd A, MatrixXd B);
  int state_size() const override { return static_cast<int>(A_.rows()); }
  int tangent_size() const override { return static_cast<int>(A_.rows()); }
  int input_size() const override { return static_cast<int>(B_.cols()); }
  VectorXd velocity(const VectorXd& x, const VectorXd& u) const override { return A_ * x + B_ * u; }
  /// RK4 on a linear system is the degree-4 Taylor polynomial of the exponential.
  void linearize(const VectorXd& x, const VectorXd& u, double h, MatrixXd& A,
                 MatrixXd& B) const override;

 private:
  MatrixXd A_, B_;
};

/// Kinematic floating-base flow: the base follows a body-frame twist and the
/// joints follow their velocity commands.
/// State: (base position, base quaternion x y z w, joint positions).
/// Tangent: (world translation, body rotation, joints). Input: (v_body, w_body, joint rates).
class WholeBodyDynamics final : public SystemDynamics {
 public:
  explicit WholeBodyDynamics(int num_joints) : n_(num_joints) {}
  int state_size() const override { return 7 + n_; }
  int tangent_size() const override { return 6 + n_; }
  int input_size() const override { return 6 + n_; }
  VectorXd velocity(const VectorXd& x, const VectorXd& u) const override;
  VectorXd retract(const VectorXd& x, const VectorXd& delta) const override;
  VectorXd difference(const VectorXd& from, const VectorXd& to) const override;

  static VectorXd pack(const Configuration& q);
  static Configuration unpack(const VectorXd& x);

 private:
  int n_;
};

}  // namespace wbmpc
