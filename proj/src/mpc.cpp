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
#include <cmath>

#include "wbmpc/ocp.hpp"

namespace wbmpc {

Trajectory shift_trajectory(const OcpProblem& problem, const Trajectory& previous,
                            const VectorXd& x0, double shift) {
  const int N = problem.nodes;
  const double dt = problem.dt();
  std::vector<VectorXd> inputs(N);
  for (int k = 0; k < N; ++k) {
    const double tau = k * dt + shift;
    const int idx = std::min(N - 1, static_cast<int>(std::floor(tau / dt + 1e-9)));
    inputs[k] = previous.inputs[idx];
  }
  return rollout(problem, x0, std::move(inputs), previous.t0 + shift);
}

MpcTrace mpc_run(const OcpProblem& problem, const VectorXd& x0, double duration,
                 double update_rate, const MpcOptions& options) {
  problem.validate();
  if (!(update_rate > 0.0)) throw ModelError("update rate must be > 0");
  MpcTrace trace;
  trace.final_state = x0;
  const int steps = static_cast<int>(std::floor(duration * update_rate + 1e-9));
  if (steps <= 0) return trace;
  const double period = 1.0 / update_rate;
  const SystemDynamics& dyn = *problem.dynamics;

  VectorXd x = x0;
  Trajectory traj;
  int stalls = 0;
  for (int s = 0; s < steps; ++s) {
    const double t = s * period;
    if (options.before_step) options.before_step(t);
    if (s == 0) {
      traj = rollout(problem, x, std::vector<VectorXd>(problem.nodes, VectorXd::Zero(dyn.input_size())), t);
    } else {
      traj = shift_trajectory(problem, traj, x, t - traj.t0);
    }

    MpcRecord rec;
    rec.t = t;
    bool stalled = false;
    for (int it = 0; it < options.iterations_per_step; ++it) {
      SlqStep step = slq_iterate(problem, traj);
      rec.times.lq_ms += step.times.lq_ms;
      rec.times.backward_ms += step.times.backward_ms;
      rec.times.linesearch_ms += step.times.linesearch_ms;
      rec.step = step.step;
      stalled = step.stalled;
      traj = std::move(step.trajectory);
    }
    rec.cost = traj.cost;
    rec.stalled = stalled;
    rec.state = x;
    rec.input = traj.inputs[0];
    const StageCost& now = traj.node_costs[0];
    if (!std::isnan(now.min_self_h)) rec.min_self_h = now.min_self_h;
    if (!std::isnan(now.min_env_h)) rec.min_env_h = now.min_env_h;
    trace.records.push_back(rec);
    if (options.on_record) options.on_record(rec);

    stalls = stalled ? stalls + 1 : 0;
    if (stalls > options.max_consecutive_stalls) {
      trace.aborted = true;
      trace.message = "solver stalled for " + std::to_string(stalls) + " consecutive steps at t = " +
                      std::to_string(t);
      break;
    }
    x = dyn.integrate(x, rec.input, period);
  }
  trace.final_state = x;
  return trace;
}

}  // namespace wbmpc
