// Copyright 2026 The dpshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPSHAPE_SIMPLEX_HPP_
#define DPSHAPE_SIMPLEX_HPP_

#include <vector>

namespace dpshape::lp {

// minimize objective . x
// subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective_value = 0.0;
};

// Two-phase dense primal simplex with Bland's rule. Deterministic; returns
// a basic feasible solution (a vertex) at optimality.
LpResult solve(const LinearProgram& lp);

}  // namespace dpshape::lp

#endif  // DPSHAPE_SIMPLEX_HPP_
