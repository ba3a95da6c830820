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

#include <span>

#include "wbmpc/common.hpp"

namespace wbmpc {

struct RbfParams {
  double mu = 1e-2;
  double delta = 1e-3;
};

struct RbfValue {
  double value;
  double d1;
  double d2;
};

/// Relaxed log barrier: -mu ln h above delta, the C2-matched quadratic below.
RbfValue rbf_eval(double h, const RbfParams& params);

/// One inequality constraint h >= 0 with its gradient over the state tangent.
struct ConstraintEval {
  double h = 0.0;
  VectorXd grad;
  int id = -1;  // pair index, arm body index or sphere index, depending on the source
  int partner = -1;  // nearest base body for broad-phase evaluations
  Vec3 witness_a = Vec3::Zero();
  Vec3 witness_b = Vec3::Zero();
  bool approximate = false;
};

struct PenaltySum {
  double value = 0.0;
  VectorXd gradient;
  MatrixXd hessian;  // Gauss-Newton
};

PenaltySum penalty_sum(std::span<const ConstraintEval> constraints, const RbfParams& params,
                       int dim);
/// Adds the penalty of `constraints` into `acc` (which must already be sized).
void accumulate_penalty(std::span<const ConstraintEval> constraints, const RbfParams& params,
                        PenaltySum& acc);

}  // namespace wbmpc
