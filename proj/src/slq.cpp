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
#include <chrono>
#include <cmath>

#include <Eigen/Cholesky>

#include "wbmpc/ocp.hpp"

namespace wbmpc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

QuadraticCost::QuadraticCost(MatrixXd Q, MatrixXd R, MatrixXd Qf, VectorXd x_ref, VectorXd u_ref)
    : Q_(std::move(Q)), R_(std::move(R)), Qf_(std::move(Qf)), x_ref_(std::move(x_ref)),
      u_ref_(std::move(u_ref)) {}

StageCost QuadraticCost::stage(double, double dt, const VectorXd& x, const VectorXd& u,
                               bool derivatives) const {
  const VectorXd ex = x - x_ref_, eu = u - u_ref_;
  StageCost c;
  c.value = dt * (ex.dot(Q_ * ex) + eu.dot(R_ * eu));
  if (derivatives) {
    c.qx = 2.0 * dt * Q_ * ex;
    c.qu = 2.0 * dt * R_ * eu;
    c.Qxx = 2.0 * dt * Q_;
    c.Quu = 2.0 * dt * R_;
    c.Qux = MatrixXd::Zero(u.size(), x.size());
  }
  return c;
}

StageCost QuadraticCost::terminal(double, const VectorXd& x, bool derivatives) const {
  const VectorXd ex = x - x_ref_;
  StageCost c;
  c.value = ex.dot(Qf_ * ex);
  if (derivatives) {
    c.qx = 2.0 * Qf_ * ex;
    c.Qxx = 2.0 * Qf_;
  }
  return c;
}

void OcpProblem::validate() const {
  if (!dynamics || !cost) throw ModelError("optimal control problem needs dynamics and a cost");
  if (!(horizon > 0.0)) throw ModelError("horizon must be > 0");
  if (nodes < 2) throw ModelError("node count must be >= 2");
}

double Trajectory::min_self_h() const {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : node_costs)
    if (!std::isnan(c.min_self_h) && !(m <= c.min_self_h)) m = c.min_self_h;
  return m;
}

double Trajectory::min_env_h() const {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : node_costs)
    if (!std::isnan(c.min_env_h) && !(m <= c.min_env_h)) m = c.min_env_h;
  return m;
}

Trajectory rollout(const OcpProblem& problem, const VectorXd& x0, std::vector<VectorXd> inputs,
                   double t0) {
  problem.validate();
  const int N = problem.nodes;
  const double dt = problem.dt();
  if (static_cast<int>(inputs.size()) != N) throw DimensionError("rollout needs one input per interval");
  Trajectory traj;
  traj.t0 = t0;
  traj.inputs = std::move(inputs);
  traj.states.reserve(N + 1);
  traj.states.push_back(x0);
  traj.node_costs.reserve(N + 1);
  for (int k = 0; k < N; ++k) {
    const double t = t0 + k * dt;
    traj.node_costs.push_back(problem.cost->stage(t, dt, traj.states[k], traj.inputs[k], false));
    traj.cost += traj.node_costs.back().value;
    traj.states.push_back(problem.dynamics->integrate(traj.states[k], traj.inputs[k], dt));
  }
  traj.node_costs.push_back(problem.cost->terminal(t0 + N * dt, traj.states[N], false));
  traj.cost += traj.node_costs.back().value;
  return traj;
}

LqApproximation lq_approximate(const OcpProblem& problem, const Trajectory& traj) {
  const int N = problem.nodes;
  const double dt = problem.dt();
  LqApproximation lq;
  lq.A.resize(N);
  lq.B.resize(N);
  lq.costs.resize(N + 1);
  auto check = [](const auto& m, int k, const char* what) {
    if (!m.allFinite()) throw Error(std::string("non-finite ") + what + " at node " + std::to_string(k));
  };
  for (int k = 0; k < N; ++k) {
    problem.dynamics->linearize(traj.states[k], traj.inputs[k], dt, lq.A[k], lq.B[k]);
    lq.costs[k] = problem.cost->stage(traj.t0 + k * dt, dt, traj.states[k], traj.inputs[k], true);
    check(lq.A[k], k, "state Jacobian");
    check(lq.B[k], k, "input Jacobian");
    check(lq.costs[k].qx, k, "cost gradient");
    check(lq.costs[k].Qxx, k, "cost Hessian");
    check(lq.costs[k].qu, k, "cost gradient");
    check(lq.costs[k].Quu, k, "cost Hessian");
  }
  lq.costs[N] = problem.cost->terminal(traj.t0 + N * dt, traj.states[N], true);
  check(lq.costs[N].qx, N, "cost gradient");
  check(lq.costs[N].Qxx, N, "cost Hessian");
  return lq;
}

BackwardPass backward_pass(const LqApproximation& lq) {
  const int N = static_cast<int>(lq.A.size());
  BackwardPass out;
  out.K.resize(N);
  out.k.resize(N);
  VectorXd Vx = lq.costs[N].qx;
  MatrixXd Vxx = lq.costs[N].Qxx;
  double reg = 0.0;
  for (int k = N - 1; k >= 0; --k) {
    const MatrixXd& A = lq.A[k];
    const MatrixXd& B = lq.B[k];
    const StageCost& c = lq.costs[k];
    const VectorXd Qx = c.qx + A.transpose() * Vx;
    const VectorXd Qu = c.qu + B.transpose() * Vx;
    const MatrixXd VxxA = Vxx * A;
    MatrixXd Qxx = c.Qxx + A.transpose() * VxxA;
    MatrixXd Quu = c.Quu + B.transpose() * Vxx * B;
    const MatrixXd Qux = c.Qux + B.transpose() * VxxA;
    Quu = 0.5 * (Quu + Quu.transpose());

    // Once regularization was needed it stays on for the remaining nodes.
    if (reg > 0.0) Quu += reg * MatrixXd::Identity(Quu.rows(), Quu.cols());
    Eigen::LLT<MatrixXd> llt(Quu);
    double prev = reg;
    while (llt.info() != Eigen::Success) {
      reg = reg == 0.0 ? 1e-8 : 2.0 * reg;
      if (reg > 1e12) throw Error("Riccati recursion: input Hessian cannot be regularized at node " + std::to_string(k));
      Quu.diagonal().array() += reg - prev;
      prev = reg;
      llt.compute(Quu);
    }
    out.K[k] = -llt.solve(Qux);
    out.k[k] = -llt.solve(Qu);
    const MatrixXd& K = out.K[k];
    const VectorXd& kff = out.k[k];
    out.linear += kff.dot(Qu);
    out.quadratic += kff.dot(Quu * kff);

    Vx = Qx + K.transpose() * (Quu * kff) + K.transpose() * Qu + Qux.transpose() * kff;
    Qxx += K.transpose() * Quu * K + K.transpose() * Qux + Qux.transpose() * K;
    Vxx = 0.5 * (Qxx + Qxx.transpose());
  }
  out.regularization = reg;
  return out;
}

SlqStep slq_iterate(const OcpProblem& problem, const Trajectory& traj) {
  problem.validate();
  const int N = problem.nodes;
  const double dt = problem.dt();
  const SystemDynamics& dyn = *problem.dynamics;
  SlqStep result;

  auto start = Clock::now();
  const LqApproximation lq = lq_approximate(problem, traj);
  result.times.lq_ms = elapsed_ms(start);

  start = Clock::now();
  const BackwardPass bp = backward_pass(lq);
  result.times.backward_ms = elapsed_ms(start);

  start = Clock::now();
  const double J0 = traj.cost;
  const double full_prediction = bp.linear + 0.5 * bp.quadratic;
  result.converged = std::abs(full_prediction) <= 1e-12 * std::max(1.0, std::abs(J0));
  result.trajectory = traj;
  double alpha = 1.0;
  for (int trial = 0; trial <= problem.max_backtracks; ++trial, alpha *= 0.5) {
    Trajectory cand;
    cand.t0 = traj.t0;
    cand.states.reserve(N + 1);
    cand.inputs.reserve(N);
    cand.node_costs.reserve(N + 1);
    cand.states.push_back(traj.states[0]);
    for (int k = 0; k < N; ++k) {
      const VectorXd dx = dyn.difference(traj.states[k], cand.states[k]);
      cand.inputs.push_back(traj.inputs[k] + alpha * bp.k[k] + bp.K[k] * dx);
      cand.node_costs.push_back(
          problem.cost->stage(traj.t0 + k * dt, dt, cand.states[k], cand.inputs[k], false));
      cand.cost += cand.node_costs.back().value;
      cand.states.push_back(dyn.integrate(cand.states[k], cand.inputs[k], dt));
    }
    cand.node_costs.push_back(problem.cost->terminal(traj.t0 + N * dt, cand.states[N], false));
    cand.cost += cand.node_costs.back().value;

    const double expected = alpha * bp.linear + 0.5 * alpha * alpha * bp.quadratic;
    result.expected_reduction = -expected;
    if (std::isfinite(cand.cost) && cand.cost <= J0 + problem.armijo * expected) {
      cand.gains = bp.K;
      cand.feedforward = bp.k;
      result.actual_reduction = J0 - cand.cost;
      result.step = alpha;
      result.trajectory = std::move(cand);
      break;
    }
  }
  if (result.step == 0.0) {
    result.trajectory.gains = bp.K;
    result.trajectory.feedforward = bp.k;
    result.stalled = !result.converged;
  }
  result.times.linesearch_ms = elapsed_ms(start);
  return result;
}

}  // namespace wbmpc
