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

#ifndef DPSHAPE_QUEUE_ANALYSIS_HPP_
#define DPSHAPE_QUEUE_ANALYSIS_HPP_

#include <cstdint>
#include <vector>

#include "dpshape/core.hpp"
#include "dpshape/shaping.hpp"

namespace dpshape::queue_analysis {

// Law of the per-slot backlog increment X = arrival - departure. Support
// values are stored in lattice units: every value is divided by the gcd of
// the nonzero byte offsets so the state space is as small as possible.
class IncrementDistribution {
 public:
  // `support_bytes` in bytes, possibly negative; duplicates are merged.
  IncrementDistribution(std::vector<std::int64_t> support_bytes,
                        std::vector<double> probs);

  const std::vector<std::int64_t>& support_units() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  std::int64_t gcd_unit() const { return gcd_unit_; }
  double mean_bytes() const { return mean_bytes_; }
  // Largest upward / downward jump, in lattice units (both nonnegative).
  std::int64_t max_up_units() const { return max_up_; }
  std::int64_t max_down_units() const { return max_down_; }

 private:
  std::vector<std::int64_t> support_;  // in units of gcd_unit_
  std::vector<double> probs_;
  std::int64_t gcd_unit_;
  double mean_bytes_;
  std::int64_t max_up_;
  std::int64_t max_down_;
};

// Builds the increment law for a (lambda, mechanism) pair by enumerating
// the joint arrival/departure coupling of the mechanism.
// With `require_stable`, throws InstabilityError when the mean increment is
// nonnegative; pass false to build the law regardless (best effort).
IncrementDistribution increment_distribution(
    const Pmf& lambda, const shaping::Mechanism& mechanism,
    bool require_stable = true);

enum class StationaryMethod {
  // Truncated reflected-walk chain solved by power iteration; the
  // truncation level grows geometrically until the tail mass is below
  // tolerance, with the top state absorbing upward transitions.
  kPowerIteration,
  // Exact ladder-height factorization of the walk: the stationary backlog
  // is a geometric compound of ascending ladder heights, so no state
  // truncation is needed for the mean.
  kLadder,
  // kLadder for wide lattices, kPowerIteration otherwise.
  kAuto,
};

struct StationaryOptions {
  double tail_tol = 1e-8;
  // Power iteration stops when successive distributions differ by less
  // than this in total variation, or after max_iterations.
  double convergence_tv = 1e-12;
  std::uint64_t max_iterations = 1'000'000;
  std::int64_t max_states = std::int64_t{1} << 20;
  StationaryMethod method = StationaryMethod::kAuto;
  // Return a flagged best-effort result instead of throwing AccuracyError
  // when limits are hit.
  bool best_effort = false;
  bool want_distribution = false;
};

struct StationaryQueueResult {
  double expected_queue_bytes = 0.0;
  std::int64_t truncation_level = 0;  // states used (0 for the ladder path)
  double tail_mass = 0.0;
  std::uint64_t iterations = 0;
  bool converged = true;
  StationaryMethod method_used = StationaryMethod::kPowerIteration;
  // Stationary law over backlog states k * gcd_unit bytes, when requested.
  std::vector<double> distribution;
  std::int64_t gcd_unit = 1;
};

// Expected stationary backlog of the reflected walk driven by `inc`.
// Deterministic; requires a strictly negative mean increment.
StationaryQueueResult stationary_expected_queue(
    const IncrementDistribution& inc, double tol = 1e-8,
    const StationaryOptions& options = {});

// Incremental interface for repeated solves over nearby increment laws
// (line searches, finite differences): the previous solution seeds the
// next solve when the lattice shape matches.
class StationarySolver {
 public:
  explicit StationarySolver(StationaryOptions options = {})
      : options_(options) {}

  StationaryQueueResult solve(const IncrementDistribution& inc);
  const StationaryOptions& options() const { return options_; }
  StationaryOptions& options() { return options_; }

 private:
  StationaryOptions options_;
  // Warm-start caches.
  std::vector<double> pi_;
  std::vector<double> ladder_up_;
  std::vector<double> ladder_down_;
  std::int64_t warm_up_span_ = -1;
  std::int64_t warm_down_span_ = -1;
};

}  // namespace dpshape::queue_analysis

#endif  // DPSHAPE_QUEUE_ANALYSIS_HPP_
