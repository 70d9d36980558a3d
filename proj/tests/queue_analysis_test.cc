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

#include "dpshape/queue_analysis.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dpshape/traces.hpp"

namespace dpshape::queue_analysis {
namespace {

using shaping::Mechanism;

// Closed-form oracle for the +/-1 reflected walk with up-probability p and
// down-probability q: the stationary law is geometric with ratio p/q, so
// the mean is (p/q) / (1 - p/q) lattice units.
double geometric_walk_mean(double p, double q) {
  const double beta = p / q;
  return beta / (1.0 - beta);
}

TEST(IncrementDistributionTest, ProductLawOfInputIndependentShaper) {
  PacketAlphabet a({0, 64});
  Pmf lambda(a, {0.5, 0.5});
  Mechanism pst = Mechanism::pst(a, Pmf::point_mass(a, 64));
  IncrementDistribution inc = increment_distribution(lambda, pst);
  EXPECT_EQ(inc.gcd_unit(), 64);
  EXPECT_EQ(inc.support_units(), (std::vector<std::int64_t>{-1, 0}));
  EXPECT_NEAR(inc.probs()[0], 0.5, 1e-12);
  EXPECT_NEAR(inc.probs()[1], 0.5, 1e-12);
  EXPECT_NEAR(inc.mean_bytes(), -32.0, 1e-12);
}

TEST(IncrementDistributionTest, IdentityChannelIsUnstable) {
  PacketAlphabet a({0, 32, 64});
  Pmf lambda(a, {0.5, 0.3, 0.2});
  Mechanism dps = Mechanism::dps(ChannelMatrix::identity(a));
  EXPECT_THROW(increment_distribution(lambda, dps), InstabilityError);
  // Best-effort construction still exposes the law.
  IncrementDistribution inc =
      increment_distribution(lambda, dps, /*require_stable=*/false);
  EXPECT_EQ(inc.support_units(), (std::vector<std::int64_t>{0}));
  EXPECT_DOUBLE_EQ(inc.mean_bytes(), 0.0);
}

TEST(IncrementDistributionTest, TimingPreservingCoupling) {
  PacketAlphabet a({0, 32, 64});
  Pmf lambda(a, {0.6, 0.2, 0.2});
  Mechanism pps = Mechanism::pps(a, Pmf::point_mass(a, 64));
  IncrementDistribution inc = increment_distribution(lambda, pps);
  // Null slots contribute X = 0; event slots contribute a_i - 64.
  EXPECT_EQ(inc.gcd_unit(), 32);
  EXPECT_EQ(inc.support_units(), (std::vector<std::int64_t>{-1, 0}));
  EXPECT_NEAR(inc.probs()[0], 0.2, 1e-12);        // 32 - 64
  EXPECT_NEAR(inc.probs()[1], 0.6 + 0.2, 1e-12);  // null slots and 64 - 64
}

TEST(StationaryTest, GeometricClosedFormBothMethods) {
  for (double beta : {0.1, 0.5, 0.9}) {
    const double q = 1.0 / (1.0 + beta);
    const double p = beta * q;
    IncrementDistribution inc({+1, -1}, {p, q});
    const double expected = geometric_walk_mean(p, q);
    for (StationaryMethod method :
         {StationaryMethod::kPowerIteration, StationaryMethod::kLadder}) {
      StationaryOptions options;
      options.method = method;
      options.convergence_tv = 1e-14;
      StationaryQueueResult r = stationary_expected_queue(inc, 1e-12, options);
      EXPECT_NEAR(r.expected_queue_bytes, expected, 1e-8 * expected)
          << "beta=" << beta << " method=" << static_cast<int>(method);
    }
  }
}

TEST(StationaryTest, PureDrainHasEmptyQueue) {
  IncrementDistribution inc({-64, 0}, {0.5, 0.5});
  StationaryQueueResult r = stationary_expected_queue(inc, 1e-10);
  EXPECT_DOUBLE_EQ(r.expected_queue_bytes, 0.0);
}

TEST(StationaryTest, RequiresNegativeDrift) {
  IncrementDistribution inc({-1, +1}, {0.5, 0.5});
  EXPECT_THROW(stationary_expected_queue(inc, 1e-8), InstabilityError);
}

TEST(StationaryTest, GcdRescalingIsExact) {
  IncrementDistribution coarse({-96, 96}, {0.7, 0.3});
  IncrementDistribution fine({-1, 1}, {0.7, 0.3});
  const double a = stationary_expected_queue(coarse, 1e-12).expected_queue_bytes;
  const double b = stationary_expected_queue(fine, 1e-12).expected_queue_bytes;
  EXPECT_NEAR(a, 96.0 * b, 1e-9 * std::max(1.0, a));
  EXPECT_EQ(coarse.gcd_unit(), 96);
}

TEST(StationaryTest, AgreesWithSimulatedConstantShaper) {
  PacketAlphabet a({0, 32, 64});
  Pmf lambda = traces::zipf_pmf(a, 5.0);
  const double b_in = input_byte_rate(lambda);
  const auto d_star = static_cast<std::int64_t>(std::ceil(b_in / 0.5));
  ASSERT_EQ(d_star, 3);
  Mechanism m = Mechanism::pst_star(a, d_star, 2);

  IncrementDistribution inc = increment_distribution(lambda, m);
  const double analytic = stationary_expected_queue(inc, 1e-10)
                              .expected_queue_bytes;

  PacketStream input = traces::synthesize_stream(lambda, 1'000'000, 12);
  const double simulated = shaping::shape_stream(input, m).report.avg_queue_bytes;
  EXPECT_NEAR(simulated, analytic, 0.02 * std::max(analytic, 1.0));
}

TEST(StationaryTest, LargerDeparturesNeverGrowTheQueue) {
  PacketAlphabet a({0, 32, 64});
  Pmf lambda(a, {0.5, 0.3, 0.2});
  double prev = kInfinity;
  for (std::int64_t d = 40; d <= 200; d += 20) {
    Mechanism m = Mechanism::pst_star(a, d);
    const double eq =
        stationary_expected_queue(increment_distribution(lambda, m), 1e-10)
            .expected_queue_bytes;
    EXPECT_LE(eq, prev + 1e-9);
    prev = eq;
  }
}

TEST(StationaryTest, MethodsAgreeOnRandomStableWalks) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::int64_t> support;
    std::vector<double> probs;
    double sum = 0.0;
    for (std::int64_t v = -6; v <= 4; ++v) {
      if (unif(rng) < 0.4) continue;
      support.push_back(v);
      probs.push_back(unif(rng) + 0.05);
      sum += probs.back();
    }
    if (support.empty()) continue;
    for (double& p : probs) p /= sum;
    double mean = 0.0;
    double up = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      mean += support[i] * probs[i];
      up = std::max<double>(up, support[i]);
    }
    if (mean >= -0.05 || up == 0.0) continue;

    IncrementDistribution inc(support, probs);
    StationaryOptions power;
    power.method = StationaryMethod::kPowerIteration;
    power.convergence_tv = 1e-14;
    StationaryOptions ladder;
    ladder.method = StationaryMethod::kLadder;
    const double a =
        stationary_expected_queue(inc, 1e-12, power).expected_queue_bytes;
    const double b =
        stationary_expected_queue(inc, 1e-12, ladder).expected_queue_bytes;
    EXPECT_NEAR(a, b, 1e-6 * std::max(1.0, std::max(a, b)))
        << "trial " << trial;
  }
}

TEST(StationaryTest, DistributionExportMatchesMean) {
  IncrementDistribution inc({-2, 1, 3}, {0.7, 0.2, 0.1});
  for (StationaryMethod method :
       {StationaryMethod::kPowerIteration, StationaryMethod::kLadder}) {
    StationaryOptions options;
    options.method = method;
    options.want_distribution = true;
    options.convergence_tv = 1e-14;
    StationaryQueueResult r = stationary_expected_queue(inc, 1e-10, options);
    ASSERT_FALSE(r.distribution.empty());
    double mass = 0.0;
    double mean = 0.0;
    for (std::size_t k = 0; k < r.distribution.size(); ++k) {
      mass += r.distribution[k];
      mean += static_cast<double>(k) * r.distribution[k];
    }
    EXPECT_NEAR(mass, 1.0, 1e-7);
    EXPECT_NEAR(mean * r.gcd_unit, r.expected_queue_bytes,
                1e-6 * std::max(1.0, r.expected_queue_bytes));
  }
}

TEST(StationaryTest, TruncationCapReportsAccuracyError) {
  // Strong upward jumps with drift barely negative: a tiny state cap
  // cannot hold the stationary mass.
  IncrementDistribution inc({+40, -1}, {0.024, 0.976});
  StationaryOptions options;
  options.method = StationaryMethod::kPowerIteration;
  options.max_states = 128;
  EXPECT_THROW(stationary_expected_queue(inc, 1e-10, options), AccuracyError);
  options.best_effort = true;
  StationaryQueueResult r = stationary_expected_queue(inc, 1e-10, options);
  EXPECT_GE(r.tail_mass, 1e-10);
}

TEST(StationaryTest, MidpointConvexityOverChannels) {
  PacketAlphabet a({0, 32, 64});
  Pmf lambda(a, {0.5, 0.3, 0.2});
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_stable_channel = [&]() {
    while (true) {
      std::vector<std::vector<double>> rows(3, std::vector<double>(3));
      for (auto& row : rows) {
        double sum = 0.0;
        for (double& v : row) {
          v = unif(rng) + 1e-3;
          sum += v;
        }
        for (double& v : row) v /= sum;
      }
      ChannelMatrix c(a, a, rows);
      Pmf out = output_distribution(lambda, c);
      if (check_stability(input_byte_rate(lambda), input_byte_rate(out))) {
        return c;
      }
    }
  };
  auto expected_queue = [&](const ChannelMatrix& c) {
    return stationary_expected_queue(
               increment_distribution(lambda, Mechanism::dps(c)), 1e-12)
        .expected_queue_bytes;
  };
  for (int trial = 0; trial < 10; ++trial) {
    ChannelMatrix c1 = random_stable_channel();
    ChannelMatrix c2 = random_stable_channel();
    std::vector<std::vector<double>> mid_rows(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        mid_rows[i][j] = 0.5 * (c1.at(i, j) + c2.at(i, j));
      }
    }
    ChannelMatrix mid(a, a, mid_rows);
    EXPECT_LE(expected_queue(mid),
              0.5 * (expected_queue(c1) + expected_queue(c2)) + 1e-6);
  }
}

}  // namespace
}  // namespace dpshape::queue_analysis
