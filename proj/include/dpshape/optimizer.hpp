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

#ifndef DPSHAPE_OPTIMIZER_HPP_
#define DPSHAPE_OPTIMIZER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpshape/core.hpp"
#include "dpshape/privacy.hpp"
#include "dpshape/queue_analysis.hpp"
#include "dpshape/shaping.hpp"

namespace dpshape::optimizer {

enum class Variant { kDps, kPst, kPps };

const char* to_string(Variant variant);
Variant variant_from_string(const std::string& name);

struct OptimizationProblem {
  Pmf lambda;
  PacketAlphabet output_alphabet;  // must cover the largest input size
  double rho_target = 0.5;
  PrivacyBudget budget = PrivacyBudget::unconstrained();
  Variant variant = Variant::kDps;
  bool pad_only = false;
};

struct SolveOptions {
  int max_iterations = 500;
  // Stop when the Frank-Wolfe gap drops below gap_tol_rel * (1 + |obj|).
  double gap_tol_rel = 1e-6;
  double queue_tol = 1e-9;
  double fd_step = 1e-6;
  int line_search_evals = 24;
};

struct OptimizationResult {
  Variant variant = Variant::kDps;
  // The solution as a channel; for kPst/kPps this is the induced channel
  // and `output_pmf` carries the optimized distribution itself.
  ChannelMatrix channel;
  std::optional<Pmf> output_pmf;
  double objective_eq_bytes = 0.0;
  double achieved_rho = 0.0;
  PrivacyBudget realized_budget = PrivacyBudget::unconstrained();
  double solver_gap = 0.0;
  int iterations = 0;
  // Set when the output alphabet cannot supply enough bytes to make the
  // efficiency bound tight, so the bound stays slack at the optimum.
  bool efficiency_capped = false;

  // The solution as a runnable shaping policy.
  shaping::Mechanism mechanism(std::uint64_t seed = 0) const;
};

// Solves the expected-backlog minimization for the requested variant under
// efficiency, stability, privacy and stochasticity constraints.
OptimizationResult solve(const OptimizationProblem& problem,
                         const SolveOptions& options = {});

struct DeterministicRate {
  std::int64_t size_bytes = 0;
  bool exceeds_mtu = false;
};

// Constant departure size matching a target efficiency: expected input
// bytes per slot divided by rho, spread over every slot (kPstStar) or only
// over event slots (kPpsStar). Rounded up to a whole byte.
DeterministicRate deterministic_rate(const Pmf& lambda, double rho,
                                     shaping::MechanismKind kind,
                                     std::int64_t mtu_bytes = 1500);

struct SweepPoint {
  Variant variant = Variant::kDps;
  double rho = 0.5;
  PrivacyBudget budget = PrivacyBudget::unconstrained();
  bool pad_only = false;
};

struct SweepEntry {
  SweepPoint point;
  std::string status;  // "ok" or the failure reason
  std::optional<OptimizationResult> result;
};

// Solves every grid point in order; per-point failures are captured in the
// entry status rather than thrown.
std::vector<SweepEntry> sweep(const Pmf& lambda,
                              const PacketAlphabet& output_alphabet,
                              const std::vector<SweepPoint>& grid,
                              const SolveOptions& options = {});

// Stationary expected backlog of a concrete mechanism under `lambda`.
double expected_queue_bytes(const Pmf& lambda,
                            const shaping::Mechanism& mechanism,
                            double tol = 1e-9);

}  // namespace dpshape::optimizer

#endif  // DPSHAPE_OPTIMIZER_HPP_
