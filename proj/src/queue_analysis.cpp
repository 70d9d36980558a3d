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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace dpshape::queue_analysis {

namespace {

constexpr double kLadderSweepTol = 1e-15;
constexpr std::uint64_t kLadderSweepCap = 100'000;
// A defect this close to 1 means the walk is effectively critical; the
// compound-geometric mean is no longer numerically meaningful.
constexpr double kCriticalDefect = 1.0 - 1e-9;

}  // namespace

IncrementDistribution::IncrementDistribution(
    std::vector<std::int64_t> support_bytes, std::vector<double> probs) {
  if (support_bytes.empty() || support_bytes.size() != probs.size()) {
    throw InvalidArgumentError(
        "IncrementDistribution: support and probs must be nonempty and "
        "equal-length");
  }
  std::map<std::int64_t, double> merged;
  double sum = 0.0;
  for (std::size_t i = 0; i < support_bytes.size(); ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
      throw InvalidArgumentError(
          "IncrementDistribution: probability outside [0, 1]");
    }
    if (probs[i] > 0.0) merged[support_bytes[i]] += probs[i];
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    throw InvalidArgumentError("IncrementDistribution: probabilities sum to " +
                               std::to_string(sum) + ", expected 1");
  }
  if (merged.empty()) {
    throw InvalidArgumentError("IncrementDistribution: empty support");
  }

  std::int64_t gcd = 0;
  for (const auto& [value, prob] : merged) {
    gcd = std::gcd(gcd, std::abs(value));
  }
  gcd_unit_ = gcd == 0 ? 1 : gcd;

  mean_bytes_ = 0.0;
  max_up_ = 0;
  max_down_ = 0;
  for (const auto& [value, prob] : merged) {
    const std::int64_t units = value / gcd_unit_;
    support_.push_back(units);
    probs_.push_back(prob);
    mean_bytes_ += prob * static_cast<double>(value);
    max_up_ = std::max(max_up_, units);
    max_down_ = std::max(max_down_, -units);
  }
}

IncrementDistribution increment_distribution(
    const Pmf& lambda, const shaping::Mechanism& mechanism,
    bool require_stable) {
  if (lambda.alphabet() != mechanism.input_alphabet()) {
    throw InvalidArgumentError(
        "increment_distribution: arrival distribution alphabet does not "
        "match the mechanism input alphabet");
  }
  std::map<std::int64_t, double> law;
  for (int i = 0; i < lambda.count(); ++i) {
    const double weight = lambda.prob_at(i);
    if (weight == 0.0) continue;
    const std::int64_t arrival = lambda.alphabet().size_at(i);
    for (const auto& [departure, prob] : mechanism.departure_law(arrival)) {
      law[arrival - departure] += weight * prob;
    }
  }
  std::vector<std::int64_t> support;
  std::vector<double> probs;
  for (const auto& [value, prob] : law) {
    support.push_back(value);
    probs.push_back(prob);
  }
  IncrementDistribution inc(std::move(support), std::move(probs));
  if (require_stable && !(inc.mean_bytes() < 0.0)) {
    throw InstabilityError(
        "increment_distribution: mean increment " +
        std::to_string(inc.mean_bytes()) +
        " bytes/slot is nonnegative; the backlog has no stationary regime");
  }
  return inc;
}

namespace {

StationaryQueueResult trivial_drain_result(const IncrementDistribution& inc,
                                           bool want_distribution) {
  // No upward jumps: the backlog never leaves zero.
  StationaryQueueResult result;
  result.expected_queue_bytes = 0.0;
  result.truncation_level = 1;
  result.tail_mass = 0.0;
  result.converged = true;
  result.gcd_unit = inc.gcd_unit();
  if (want_distribution) result.distribution = {1.0};
  return result;
}

struct PowerState {
  std::vector<double>* warm_pi;
};

StationaryQueueResult solve_power_iteration(const IncrementDistribution& inc,
                                            const StationaryOptions& options,
                                            std::vector<double>* warm_pi) {
  const auto& support = inc.support_units();
  const auto& probs = inc.probs();
  const std::int64_t up = inc.max_up_units();
  const std::int64_t down = inc.max_down_units();

  StationaryQueueResult result;
  result.method_used = StationaryMethod::kPowerIteration;
  result.gcd_unit = inc.gcd_unit();

  std::int64_t num_states =
      std::max<std::int64_t>(64, 4 * (up + down) + 16);
  if (warm_pi != nullptr && !warm_pi->empty()) {
    num_states = std::max<std::int64_t>(
        num_states, static_cast<std::int64_t>(warm_pi->size()));
  }
  num_states = std::min(num_states, options.max_states);

  std::vector<double> pi;
  if (warm_pi != nullptr && !warm_pi->empty()) {
    pi = *warm_pi;
    pi.resize(num_states, 0.0);
    double mass = std::accumulate(pi.begin(), pi.end(), 0.0);
    if (mass > 0.0) {
      for (double& p : pi) p /= mass;
    } else {
      pi.assign(num_states, 0.0);
      pi[0] = 1.0;
    }
  } else {
    pi.assign(num_states, 0.0);
    pi[0] = 1.0;
  }

  std::vector<double> next(num_states, 0.0);
  std::uint64_t iterations = 0;
  bool converged = false;
  const std::int64_t tail_window = std::max<std::int64_t>(up, 1);

  while (true) {
    const std::int64_t K = num_states;
    converged = false;
    while (iterations < options.max_iterations) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t xi = 0; xi < support.size(); ++xi) {
        const std::int64_t x = support[xi];
        const double p = probs[xi];
        if (x >= 0) {
          for (std::int64_t q = 0; q + x < K; ++q) next[q + x] += p * pi[q];
          if (x > 0) {
            double cap_mass = 0.0;
            for (std::int64_t q = K - x; q < K; ++q) cap_mass += pi[q];
            next[K - 1] += p * cap_mass;
          }
        } else {
          const std::int64_t m = -x;
          double floor_mass = 0.0;
          for (std::int64_t q = 0; q < m && q < K; ++q) floor_mass += pi[q];
          next[0] += p * floor_mass;
          for (std::int64_t q = m; q < K; ++q) next[q - m] += p * pi[q];
        }
      }
      ++iterations;
      double tv = 0.0;
      for (std::int64_t q = 0; q < K; ++q) tv += std::abs(next[q] - pi[q]);
      pi.swap(next);
      if (0.5 * tv < options.convergence_tv) {
        converged = true;
        break;
      }
    }

    double tail = 0.0;
    for (std::int64_t q = std::max<std::int64_t>(0, K - tail_window); q < K; ++q) {
      tail += pi[q];
    }
    result.tail_mass = tail;
    result.truncation_level = K;
    result.iterations = iterations;
    result.converged = converged;

    if (tail < options.tail_tol && converged) break;
    if (iterations >= options.max_iterations) break;
    if (K >= options.max_states) break;
    num_states = std::min<std::int64_t>(K * 2, options.max_states);
    pi.resize(num_states, 0.0);
    next.assign(num_states, 0.0);
  }

  if (result.tail_mass >= options.tail_tol || !result.converged) {
    if (!options.best_effort) {
      throw AccuracyError(
          "stationary_expected_queue: truncation/iteration limits reached "
          "with tail mass " +
          std::to_string(result.tail_mass));
    }
  }

  long double mean_units = 0.0L;
  for (std::size_t q = 0; q < pi.size(); ++q) {
    mean_units += static_cast<long double>(q) * pi[q];
  }
  result.expected_queue_bytes =
      static_cast<double>(mean_units) * static_cast<double>(inc.gcd_unit());
  if (options.want_distribution) result.distribution = pi;
  if (warm_pi != nullptr) *warm_pi = std::move(pi);
  return result;
}

// Ladder-height factorization. `u[m]`, m in [1, up]: defective law of the
// first strictly positive level of the walk. `v[j]`, j in [0, down]: law of
// the (certain) first weakly negative displacement. They satisfy
//   u(m) (1 - v(0)) = f(m) + sum_k u(m+k) v(k)
//   v(j)            = f(-j) + sum_i u(i) v(i+j)
// and successive substitution from zero converges monotonically. The
// stationary backlog is a geometric compound of the ascending heights:
//   E[Q] = sum_m m u(m) / (1 - sigma),  sigma = sum_m u(m).
StationaryQueueResult solve_ladder(const IncrementDistribution& inc,
                                   const StationaryOptions& options,
                                   std::vector<double>* warm_u,
                                   std::vector<double>* warm_v,
                                   std::int64_t* warm_up_span,
                                   std::int64_t* warm_down_span) {
  const std::int64_t up = inc.max_up_units();
  const std::int64_t down = inc.max_down_units();

  StationaryQueueResult result;
  result.method_used = StationaryMethod::kLadder;
  result.gcd_unit = inc.gcd_unit();

  std::vector<double> f_pos(up + 1, 0.0);
  std::vector<double> f_neg(down + 1, 0.0);
  const auto& support = inc.support_units();
  const auto& probs = inc.probs();
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] > 0) {
      f_pos[support[i]] += probs[i];
    } else {
      f_neg[-support[i]] += probs[i];
    }
  }

  std::vector<double> u(up + 1, 0.0);
  std::vector<double> v(down + 1, 0.0);
  const bool have_warm = warm_u != nullptr && *warm_up_span == up &&
                         *warm_down_span == down && !warm_u->empty();
  if (have_warm) {
    u = *warm_u;
    v = *warm_v;
  }

  const std::uint64_t sweep_cap =
      std::min<std::uint64_t>(options.max_iterations, kLadderSweepCap);
  std::uint64_t sweeps = 0;
  double change = kInfinity;
  bool critical = false;
  while (sweeps < sweep_cap) {
    change = 0.0;
    const double denom = 1.0 - v[0];
    if (!(denom > 0.0)) {
      critical = true;
      break;
    }
    for (std::int64_t m = up; m >= 1; --m) {
      double num = f_pos[m];
      const std::int64_t k_max = std::min<std::int64_t>(down, up - m);
      for (std::int64_t k = 1; k <= k_max; ++k) num += u[m + k] * v[k];
      const double fresh = num / denom;
      change = std::max(change, std::abs(fresh - u[m]));
      u[m] = fresh;
    }
    for (std::int64_t j = down; j >= 0; --j) {
      double num = f_neg[j];
      const std::int64_t i_max = std::min<std::int64_t>(up, down - j);
      for (std::int64_t i = 1; i <= i_max; ++i) num += u[i] * v[i + j];
      change = std::max(change, std::abs(num - v[j]));
      v[j] = num;
    }
    ++sweeps;
    double sigma = std::accumulate(u.begin() + 1, u.end(), 0.0);
    if (sigma >= kCriticalDefect) {
      critical = true;
      break;
    }
    if (change < kLadderSweepTol) break;
  }

  result.iterations = sweeps;
  result.converged = !critical && change < kLadderSweepTol;
  double sigma = std::accumulate(u.begin() + 1, u.end(), 0.0);
  result.tail_mass = 0.0;

  if (critical || sigma >= kCriticalDefect) {
    if (!options.best_effort) {
      throw AccuracyError(
          "stationary_expected_queue: walk is numerically critical "
          "(ascent probability " +
          std::to_string(sigma) + ")");
    }
    sigma = std::min(sigma, kCriticalDefect);
    result.converged = false;
  } else if (!result.converged && !options.best_effort) {
    throw AccuracyError(
        "stationary_expected_queue: ladder factorization did not converge "
        "within the sweep budget");
  }

  long double first_moment = 0.0L;
  for (std::int64_t m = 1; m <= up; ++m) {
    first_moment += static_cast<long double>(m) * u[m];
  }
  result.expected_queue_bytes = static_cast<double>(
      first_moment / (1.0L - static_cast<long double>(sigma)) *
      static_cast<long double>(inc.gcd_unit()));

  if (options.want_distribution) {
    // Compound-geometric expansion until the requested tail is covered.
    std::vector<double> dist;
    dist.push_back(1.0 - sigma);
    double covered = dist[0];
    while (covered < 1.0 - options.tail_tol &&
           static_cast<std::int64_t>(dist.size()) < options.max_states) {
      const std::int64_t k = static_cast<std::int64_t>(dist.size());
      double value = 0.0;
      for (std::int64_t j = 1; j <= std::min<std::int64_t>(k, up); ++j) {
        value += u[j] * dist[k - j];
      }
      dist.push_back(value);
      covered += value;
    }
    result.tail_mass = std::max(0.0, 1.0 - covered);
    result.truncation_level = static_cast<std::int64_t>(dist.size());
    result.distribution = std::move(dist);
  }

  if (warm_u != nullptr) {
    *warm_u = std::move(u);
    *warm_v = std::move(v);
    *warm_up_span = up;
    *warm_down_span = down;
  }
  return result;
}

StationaryMethod pick_method(const IncrementDistribution& inc,
                             StationaryMethod requested) {
  if (requested != StationaryMethod::kAuto) return requested;
  // Wide lattices make the truncated chain large; the ladder form stays
  // O(up * down) per sweep regardless of how deep the backlog distribution
  // reaches.
  return inc.max_up_units() + inc.max_down_units() > 128
             ? StationaryMethod::kLadder
             : StationaryMethod::kPowerIteration;
}

}  // namespace

StationaryQueueResult StationarySolver::solve(const IncrementDistribution& inc) {
  if (!(inc.mean_bytes() < 0.0)) {
    throw InstabilityError(
        "stationary_expected_queue: mean increment must be negative, got " +
        std::to_string(inc.mean_bytes()) + " bytes/slot");
  }
  if (inc.max_up_units() == 0) {
    return trivial_drain_result(inc, options_.want_distribution);
  }
  switch (pick_method(inc, options_.method)) {
    case StationaryMethod::kLadder:
      return solve_ladder(inc, options_, &ladder_up_, &ladder_down_,
                          &warm_up_span_, &warm_down_span_);
    default:
      return solve_power_iteration(inc, options_, &pi_);
  }
}

StationaryQueueResult stationary_expected_queue(
    const IncrementDistribution& inc, double tol,
    const StationaryOptions& options) {
  StationaryOptions opts = options;
  opts.tail_tol = tol;
  StationarySolver solver(opts);
  return solver.solve(inc);
}

}  // namespace dpshape::queue_analysis
