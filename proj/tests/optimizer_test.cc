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

#include "dpshape/optimizer.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "dpshape/traces.hpp"

namespace dpshape::optimizer {
namespace {

using shaping::Mechanism;
using shaping::MechanismKind;

Pmf camera() { return Pmf(PacketAlphabet({0, 142, 270}), {0.85, 0.14, 0.01}); }

Pmf zipf1() { return traces::zipf_pmf(PacketAlphabet({0, 32, 64}), 1.0); }

TEST(DeterministicRateTest, Examples) {
  DeterministicRate pst = deterministic_rate(camera(), 0.5,
                                             MechanismKind::kPstStar);
  EXPECT_EQ(pst.size_bytes, 46);  // ceil(22.58 / 0.5)
  EXPECT_FALSE(pst.exceeds_mtu);

  DeterministicRate pps = deterministic_rate(camera(), 0.5,
                                             MechanismKind::kPpsStar);
  EXPECT_EQ(pps.size_bytes, 302);  // ceil(45.16 / 0.15)
  EXPECT_FALSE(pps.exceeds_mtu);
  EXPECT_TRUE(deterministic_rate(camera(), 0.02, MechanismKind::kPpsStar)
                  .exceeds_mtu);
}

TEST(DeterministicRateTest, StrictStabilityAtHighEfficiency) {
  // Integer input rate and rho -> 1: the ceiling must land one byte above.
  Pmf lambda(PacketAlphabet({0, 40}), {0.5, 0.5});  // 20 bytes/slot
  DeterministicRate r =
      deterministic_rate(lambda, 0.9999999, MechanismKind::kPstStar);
  EXPECT_EQ(r.size_bytes, 21);
  EXPECT_THROW(deterministic_rate(lambda, 1.0, MechanismKind::kPstStar),
               InvalidArgumentError);
}

TEST(DeterministicRateTest, ExactIntegerTargetDoesNotRoundUp) {
  // B_in / rho lands exactly on 32 by construction.
  const double b_in = input_byte_rate(zipf1());
  const double rho = b_in / 32.0;
  EXPECT_EQ(deterministic_rate(zipf1(), rho, MechanismKind::kPstStar).size_bytes,
            32);
}

TEST(SolveTest, InputIndependentOptimumIsDeterministicWhenTargetInAlphabet) {
  // With the constant size in the output alphabet, the optimum is the point
  // mass on it: closed form 32 * (1/3) / (2/3) = 16 bytes.
  const double b_in = input_byte_rate(zipf1());
  OptimizationProblem problem{
      .lambda = zipf1(),
      .output_alphabet = zipf1().alphabet(),
      .rho_target = b_in / 32.0,
      .budget = PrivacyBudget(0.0, 0.0),
      .variant = Variant::kPst,
  };
  OptimizationResult r = solve(problem);
  EXPECT_NEAR(r.objective_eq_bytes, 16.0,
              std::max(2.0 * r.solver_gap, 1e-3 * 16.0));
  ASSERT_TRUE(r.output_pmf.has_value());
  EXPECT_NEAR(r.output_pmf->prob_at(1), 1.0, 1e-6);
  EXPECT_NEAR(r.achieved_rho, problem.rho_target, 1e-6);
}

TEST(SolveTest, PadOnlyCollapseUnderFiniteBudgets) {
  OptimizationProblem problem{
      .lambda = camera(),
      .output_alphabet = camera().alphabet(),
      .rho_target = 0.05,
      .budget = PrivacyBudget(0.0, 0.0),
      .variant = Variant::kDps,
      .pad_only = true,
  };
  OptimizationResult r = solve(problem);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(r.channel.at(i, 2), 1.0);
  EXPECT_DOUBLE_EQ(r.objective_eq_bytes, 0.0);
  EXPECT_NEAR(r.achieved_rho, input_byte_rate(camera()) / 270.0, 1e-15);

  // Requesting more efficiency than the collapse can deliver must fail.
  problem.rho_target = 0.5;
  EXPECT_THROW(solve(problem), FeasibilityError);
}

TEST(SolveTest, UnconstrainedBudgetBeatsCoarseGridSearch) {
  Pmf lambda(PacketAlphabet({0, 32, 64}), {0.5, 0.3, 0.2});
  OptimizationProblem problem{
      .lambda = lambda,
      .output_alphabet = lambda.alphabet(),
      .rho_target = 0.7,
      .budget = PrivacyBudget::unconstrained(),
      .variant = Variant::kDps,
  };
  OptimizationResult r = solve(problem);

  // Coarse grid over right-stochastic 3x3 matrices (step 0.25 per row).
  const double b_in = input_byte_rate(lambda);
  double grid_min = kInfinity;
  const int steps = 4;
  std::vector<std::vector<double>> row_choices;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j + i <= steps; ++j) {
      row_choices.push_back({static_cast<double>(i) / steps,
                             static_cast<double>(j) / steps,
                             static_cast<double>(steps - i - j) / steps});
    }
  }
  for (const auto& r0 : row_choices) {
    for (const auto& r1 : row_choices) {
      for (const auto& r2 : row_choices) {
        ChannelMatrix c(lambda.alphabet(), lambda.alphabet(), {r0, r1, r2});
        const double b_out = output_byte_rate_dps(lambda, c);
        if (!(b_out > b_in * (1.0 + 1e-9) &&
              b_out <= b_in / problem.rho_target)) {
          continue;
        }
        const double eq = expected_queue_bytes(lambda, Mechanism::dps(c));
        grid_min = std::min(grid_min, eq);
      }
    }
  }
  ASSERT_LT(grid_min, kInfinity);
  EXPECT_LE(r.objective_eq_bytes, grid_min + 1e-6);
}

TEST(SolveTest, MatchesDenseGridOnTwoSymbolAlphabet) {
  // Two free parameters: the emit probabilities for null and event rows.
  // The backlog has the +64/0/-64 form, so the geometric closed form
  // provides the oracle for a dense grid scan. The instance is arranged so
  // the binding-constraint intersection (the continuous optimum) sits
  // exactly on grid coordinates: u* = 0.75, v* = 0.8 with ratio bound 1.25.
  PacketAlphabet a({0, 64});
  Pmf lambda(a, {0.5, 0.5});
  const double b_in = input_byte_rate(lambda);  // 32
  const double rho = 32.0 / 49.6;
  const double bound = 1.25;
  const PrivacyBudget budget(1.0, 2.0 * std::log(bound));
  const double feas_slack = 1e-9;

  double grid_min = kInfinity;
  const int res = 1000;
  for (int ui = 0; ui <= res; ++ui) {
    for (int vi = 0; vi <= res; ++vi) {
      const double u = static_cast<double>(ui) / res;
      const double v = static_cast<double>(vi) / res;
      if (v > bound * u + feas_slack || u > bound * v + feas_slack) continue;
      if ((1.0 - v) > bound * (1.0 - u) + feas_slack ||
          (1.0 - u) > bound * (1.0 - v) + feas_slack) {
        continue;
      }
      const double b_out = 64.0 * (0.5 * u + 0.5 * v);
      if (!(b_out > b_in && b_out <= b_in / rho + feas_slack)) continue;
      const double p_up = 0.5 * (1.0 - v);
      const double p_down = 0.5 * u;
      if (!(p_up < p_down)) continue;
      const double eq = 64.0 * p_up / (p_down - p_up);
      grid_min = std::min(grid_min, eq);
    }
  }
  ASSERT_LT(grid_min, kInfinity);
  // The engineered optimum: 64 * 0.1 / (0.375 - 0.1).
  EXPECT_NEAR(grid_min, 6.4 / 0.275, 1e-9);

  OptimizationProblem problem{
      .lambda = lambda,
      .output_alphabet = a,
      .rho_target = rho,
      .budget = budget,
      .variant = Variant::kDps,
  };
  OptimizationResult r = solve(problem);
  EXPECT_NEAR(r.objective_eq_bytes, grid_min, 1e-3 * grid_min);
}

TEST(SolveTest, RhoOutsideRangeIsRejectedWithRange) {
  OptimizationProblem problem{
      .lambda = camera(),
      .output_alphabet = camera().alphabet(),
      .rho_target = 0.001,
      .budget = PrivacyBudget(5.0, 5.0),
      .variant = Variant::kDps,
  };
  try {
    solve(problem);
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("range"), std::string::npos);
  }
  problem.rho_target = 1.0;
  EXPECT_THROW(solve(problem), FeasibilityError);
}

TEST(SolveTest, TimingPreservingNeedsEventCapacity) {
  // All capacity is needed already on average: no room above stability.
  Pmf lambda(PacketAlphabet({0, 32, 64}), {0.05, 0.0, 0.95});
  OptimizationProblem problem{
      .lambda = lambda,
      .output_alphabet = lambda.alphabet(),
      .rho_target = 0.97,
      .budget = PrivacyBudget(0.0, kInfinity),
      .variant = Variant::kPps,
  };
  EXPECT_THROW(solve(problem), FeasibilityError);
}

TEST(SolveTest, SolutionsHonorTheRequestedBudget) {
  for (double eps : {0.1, 1.0, 5.0}) {
    OptimizationProblem problem{
        .lambda = zipf1(),
        .output_alphabet = zipf1().alphabet(),
        .rho_target = 0.6,
        .budget = PrivacyBudget(eps, eps),
        .variant = Variant::kDps,
    };
    OptimizationResult r = solve(problem);
    privacy::LdpAudit audit = privacy::ldp_level(r.channel);
    EXPECT_TRUE(audit.satisfies(problem.budget)) << "eps=" << eps;
    EXPECT_LE(r.realized_budget.eps_size(), eps + 1e-7);
    EXPECT_LE(r.realized_budget.eps_timing(), eps + 1e-7);
    EXPECT_GE(r.achieved_rho, problem.rho_target - 1e-7);
  }
}

TEST(SolveTest, EfficiencyBindsWhenAttainable) {
  OptimizationProblem problem{
      .lambda = camera(),
      .output_alphabet = camera().alphabet(),
      .rho_target = 0.5,
      .budget = PrivacyBudget(0.0, 0.0),
      .variant = Variant::kPst,
  };
  OptimizationResult r = solve(problem);
  EXPECT_FALSE(r.efficiency_capped);
  EXPECT_NEAR(r.achieved_rho, 0.5, 1e-4);

  // The event-slot alphabet cap leaves the bound slack for the
  // timing-preserving variant at this target.
  problem.variant = Variant::kPps;
  OptimizationResult pps = solve(problem);
  EXPECT_TRUE(pps.efficiency_capped);
  EXPECT_GT(pps.achieved_rho, 0.5);
}

TEST(SolveTest, SpecialBudgetsNestIntoTheGeneralShaper) {
  Pmf lambda = zipf1();
  SolveOptions options;
  options.max_iterations = 300;
  auto run = [&](Variant variant, PrivacyBudget budget) {
    OptimizationProblem problem{
        .lambda = lambda,
        .output_alphabet = lambda.alphabet(),
        .rho_target = 0.55,
        .budget = budget,
        .variant = variant,
    };
    return solve(problem, options);
  };
  OptimizationResult dps00 = run(Variant::kDps, PrivacyBudget(0.0, 0.0));
  OptimizationResult pst = run(Variant::kPst, PrivacyBudget(0.0, 0.0));
  EXPECT_NEAR(dps00.objective_eq_bytes, pst.objective_eq_bytes,
              2.0 * (dps00.solver_gap + pst.solver_gap) + 1e-3);

  OptimizationResult dps0inf =
      run(Variant::kDps, PrivacyBudget(0.0, kInfinity));
  OptimizationResult pps = run(Variant::kPps, PrivacyBudget(0.0, kInfinity));
  EXPECT_NEAR(dps0inf.objective_eq_bytes, pps.objective_eq_bytes,
              2.0 * (dps0inf.solver_gap + pps.solver_gap) + 1e-3);
}

TEST(SolveTest, DeterministicGivenFixedInputs) {
  OptimizationProblem problem{
      .lambda = zipf1(),
      .output_alphabet = zipf1().alphabet(),
      .rho_target = 0.6,
      .budget = PrivacyBudget(1.0, 1.0),
      .variant = Variant::kDps,
  };
  OptimizationResult a = solve(problem);
  OptimizationResult b = solve(problem);
  EXPECT_EQ(a.channel, b.channel);
  EXPECT_DOUBLE_EQ(a.objective_eq_bytes, b.objective_eq_bytes);
}

TEST(SweepTest, CapturesPerPointFailures) {
  std::vector<SweepPoint> grid;
  for (double rho : {0.05, 0.5}) {
    grid.push_back(SweepPoint{Variant::kPst, rho, PrivacyBudget(0.0, 0.0),
                              false});
  }
  std::vector<SweepEntry> entries =
      sweep(camera(), camera().alphabet(), grid);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_NE(entries[0].status, "ok");  // below the feasible range
  EXPECT_FALSE(entries[0].result.has_value());
  EXPECT_EQ(entries[1].status, "ok");
  ASSERT_TRUE(entries[1].result.has_value());
}

TEST(ExpectedQueueTest, PadOnlyMechanismsHaveEmptyQueues) {
  EXPECT_DOUBLE_EQ(
      expected_queue_bytes(camera(), Mechanism::pst0(camera().alphabet())),
      0.0);
  EXPECT_DOUBLE_EQ(
      expected_queue_bytes(camera(), Mechanism::pps0(camera().alphabet())),
      0.0);
  // Echoing every arrival keeps the queue empty too (increments are all 0).
  EXPECT_DOUBLE_EQ(
      expected_queue_bytes(
          camera(),
          Mechanism::dps(ChannelMatrix::identity(camera().alphabet()))),
      0.0);
  // Swallowing all traffic is genuinely unstable.
  EXPECT_THROW(
      expected_queue_bytes(
          camera(), Mechanism::pst(camera().alphabet(),
                                   Pmf::point_mass(camera().alphabet(), 0))),
      InstabilityError);
}

}  // namespace
}  // namespace dpshape::optimizer
