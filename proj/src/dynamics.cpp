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
#include "wbmpc/dynamics.hpp"

namespace wbmpc {

VectorXd SystemDynamics::integrate(const VectorXd& x, const VectorXd& u, double h) const {
  const VectorXd k1 = velocity(x, u);
  const VectorXd k2 = velocity(retract(x, 0.5 * h * k1), u);
  const VectorXd k3 = velocity(retract(x, 0.5 * h * k2), u);
  const VectorXd k4 = velocity(retract(x, h * k3), u);
  return retract(x, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

void SystemDynamics::linearize(const VectorXd& x, const VectorXd& u, double h, MatrixXd& A,
                               MatrixXd& B) const {
  constexpr double kStep = 1e-6;
  const int nx = tangent_size(), nu = input_size();
  const VectorXd x_next = integrate(x, u, h);
  A.resize(nx, nx);
  B.resize(nx, nu);
  VectorXd d = VectorXd::Zero(nx);
  for (int i = 0; i < nx; ++i) {
    d[i] = kStep;
    const VectorXd plus = difference(x_next, integrate(retract(x, d), u, h));
    d[i] = -kStep;
    const VectorXd minus = difference(x_next, integrate(retract(x, d), u, h));
    d[i] = 0.0;
    A.col(i) = (plus - minus) / (2.0 * kStep);
  }
  VectorXd up = u;
  for (int i = 0; i < nu; ++i) {
    up[i] = u[i] + kStep;
    const VectorXd plus = difference(x_next, integrate(x, up, h));
    up[i] = u[i] - kStep;
    const VectorXd minus = difference(x_next, integrate(x, up, h));
    up[i] = u[i];
    B.col(i) = (plus - minus) / (2.0 * kStep);
  }
}

LinearDynamics::LinearDynamics(MatrixXd A, MatrixXd B) : A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() != A_.cols() || B_.rows() != A_.rows())
    throw DimensionError("linear dynamics: A must be square and B must match its rows");
}

void LinearDynamics::linearize(const VectorXd&, const VectorXd&, double h, MatrixXd& A,
                               MatrixXd& B) const {
  const int n = state_size();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd hA = h * A_;
  const MatrixXd hA2 = hA * hA;
  A = I + hA + hA2 / 2.0 + hA2 * hA / 6.0 + hA2 * hA2 / 24.0;
  B = h * (I + hA / 2.0 + hA2 / 6.0 + hA2 * hA / 24.0) * B_;
}

VectorXd WholeBodyDynamics::pack(const Configuration& q) {
  VectorXd x(7 + q.joints.size());
  x.head<3>() = q.base.translation;
  x.segment<4>(3) = q.base.rotation.coeffs();
  x.tail(q.joints.size()) = q.joints;
  return x;
}

Configuration WholeBodyDynamics::unpack(const VectorXd& x) {
  Configuration q;
  q.base.translation = x.head<3>();
  q.base.rotation.coeffs() = x.segment<4>(3);
  q.joints = x.tail(x.size() - 7);
  return q;
}

VectorXd WholeBodyDynamics::velocity(const VectorXd& x, const VectorXd& u) const {
  if (x.size() != state_size() || u.size() != input_size())
    throw DimensionError("whole-body flow: state or input size mismatch");
  Quat rot;
  rot.coeffs() = x.segment<4>(3);
  VectorXd v(tangent_size());
  v.head<3>() = rot.normalized() * u.head<3>();
  v.segment(3, 3 + n_) = u.tail(3 + n_);
  return v;
}

VectorXd WholeBodyDynamics::retract(const VectorXd& x, const VectorXd& delta) const {
  return pack(wbmpc::retract(unpack(x), delta));
}

VectorXd WholeBodyDynamics::difference(const VectorXd& from, const VectorXd& to) const {
  return wbmpc::difference(unpack(from), unpack(to));
}

}  // namespace wbmpc
