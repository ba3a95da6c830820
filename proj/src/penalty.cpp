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
#include "wbmpc/penalty.hpp"

#include <cmath>
#include <string>

namespace wbmpc {

RbfValue rbf_eval(double h, const RbfParams& p) {
  if (h >= p.delta) return {-p.mu * std::log(h), -p.mu / h, p.mu / (h * h)};
  const double e = h - p.delta;
  const double c = p.mu / (p.delta * p.delta);
  return {-p.mu * std::log(p.delta) - (p.mu / p.delta) * e + 0.5 * c * e * e,
          -p.mu / p.delta + c * e, c};
}

void accumulate_penalty(std::span<const ConstraintEval> constraints, const RbfParams& params,
                        PenaltySum& acc) {
  const Eigen::Index dim = acc.gradient.size();
  for (const auto& c : constraints) {
    if (c.grad.size() != dim)
      throw DimensionError("constraint gradient has " + std::to_string(c.grad.size()) +
                           " entries, expected " + std::to_string(dim));
    const RbfValue b = rbf_eval(c.h, params);
    acc.value += b.value;
    acc.gradient.noalias() += b.d1 * c.grad;
    acc.hessian.selfadjointView<Eigen::Lower>().rankUpdate(c.grad, b.d2);
  }
  acc.hessian.triangularView<Eigen::StrictlyUpper>() = acc.hessian.transpose();
}

PenaltySum penalty_sum(std::span<const ConstraintEval> constraints, const RbfParams& params,
                       int dim) {
  PenaltySum acc{0.0, VectorXd::Zero(dim), MatrixXd::Zero(dim, dim)};
  accumulate_penalty(constraints, params, acc);
  return acc;
}

}  // namespace wbmpc
