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

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wbmpc/common.hpp"
#include "wbmpc/dynamics.hpp"

namespace wbmpc {

/// Cost contribution of one node with its quadratic model in tangent coordinates.
struct StageCost {
  double value = 0.0;
  VectorXd qx, qu;
  MatrixXd Qxx, Quu, Qux;
  /// Smallest constraint values seen at this node (NaN when the term is off).
  double min_self_h = std::numeric_limits<double>::quiet_NaN();
  double min_env_h = std::numeric_limits<double>::quiet_NaN();
  int env_outside = 0;  // sphere queries that fell outside the field
};

class CostFunction {
 public:
  virtual ~CostFunction() = default;
  /// Running cost over [t, t + dt], i.e. the cost rate times dt.
  virtual StageCost stage(double t, double dt, const VectorXd& x, const VectorXd& u,
                          bool derivatives) const = 0;
  virtual StageCost terminal(double t, const VectorXd& x, bool derivatives) const = 0;
};

/// |x - x_ref|^2_Q + |u - u_ref|^2_R per unit time, |x - x_ref|^2_Qf at the end.
class QuadraticCost final : public CostFunction {
 public:
  QuadraticCost(MatrixXd Q, MatrixXd R, MatrixXd Qf, VectorXd x_ref, VectorXd u_ref);
  StageCost stage(double t, double dt, const VectorXd& x, const VectorXd& u,
                  bool derivatives) const override;
  StageCost terminal(double t, const VectorXd& x, bool derivatives) const override;

 private:
  MatrixXd Q_, R_, Qf_;
  VectorXd x_ref_, u_ref_;
};

struct OcpProblem {
  const SystemDynamics* dynamics = nullptr;
  const CostFunction* cost = nullptr;
  double horizon = 1.0;  // s
  int nodes = 20;        // intervals
  double armijo = 1e-4;
  int max_backtracks = 10;  // step lengths 1, 1/2, ..., 2^-max_backtracks

  double dt() const { return horizon / nodes; }
  void validate() const;
};

struct Trajectory {
  double t0 = 0.0;
  std::vector<VectorXd> states;  // nodes + 1
  std::vector<VectorXd> inputs;  // nodes
  std::vector<MatrixXd> gains;   // feedback, nodes
  std::vector<VectorXd> feedforward;
  std::vector<StageCost> node_costs;  // values and constraint minima, nodes + 1
  double cost = 0.0;

  double min_self_h() const;
  double min_env_h() const;
};

/// Open-loop rollout from x0 with the given inputs; fills costs, not gains.
Trajectory rollout(const OcpProblem& problem, const VectorXd& x0, std::vector<VectorXd> inputs,
                   double t0);

struct LqApproximation {
  std::vector<MatrixXd> A, B;
  std::vector<StageCost> costs;  // nodes + 1, with derivatives
};

LqApproximation lq_approximate(const OcpProblem& problem, const Trajectory& trajectory);

struct BackwardPass {
  std::vector<MatrixXd> K;
  std::vector<VectorXd> k;
  /// Predicted change of cost for step alpha: alpha * linear + alpha^2 / 2 * quadratic.
  double linear = 0.0;
  double quadratic = 0.0;
  double regularization = 0.0;
};

BackwardPass backward_pass(const LqApproximation& lq);

struct PhaseTimes {
  double lq_ms = 0.0;
  double backward_ms = 0.0;
  double linesearch_ms = 0.0;
  double total() const { return lq_ms + backward_ms + linesearch_ms; }
};

struct SlqStep {
  Trajectory trajectory;
  double expected_reduction = 0.0;  // at the accepted (or last tried) step
  double actual_reduction = 0.0;
  double step = 0.0;  // 0 when nothing was accepted
  bool converged = false;  // predicted reduction negligible
  bool stalled = false;    // line search failed despite a meaningful prediction
  PhaseTimes times;
};

SlqStep slq_iterate(const OcpProblem& problem, const Trajectory& trajectory);

struct MpcRecord {
  double t = 0.0;
  PhaseTimes times;
  double cost = 0.0;
  std::optional<double> min_self_h;
  std::optional<double> min_env_h;
  VectorXd state;
  VectorXd input;
  bool stalled = false;
  double step = 0.0;
};

struct MpcTrace {
  std::vector<MpcRecord> records;
  bool aborted = false;
  std::string message;
  VectorXd final_state;
};

struct MpcOptions {
  int iterations_per_step = 1;
  int max_consecutive_stalls = 5;
  /// Called before each solve with the current time (e.g. to refresh a map).
  std::function<void(double)> before_step;
  /// Called after each record is produced.
  std::function<void(const MpcRecord&)> on_record;
};

/// Shifts `previous` forward by `shift` seconds (zero-order hold on the inputs)
/// and rolls it out again from x0.
Trajectory shift_trajectory(const OcpProblem& problem, const Trajectory& previous,
                            const VectorXd& x0, double shift);

MpcTrace mpc_run(const OcpProblem& problem, const VectorXd& x0, double duration,
                 double update_rate, const MpcOptions& options = {});

}  // namespace wbmpc
