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

#ifndef DPSHAPE_PRIVACY_HPP_
#define DPSHAPE_PRIVACY_HPP_

#include <cstdint>
#include <vector>

#include "dpshape/core.hpp"
#include "dpshape/shaping.hpp"

namespace dpshape::privacy {

// Log-scale tolerance for comparing realized budgets against requested ones.
inline constexpr double kLogTolerance = 1e-9;

struct LdpWitness {
  int row_i = -1;
  int row_k = -1;
  int col_j = -1;
};

// Realized per-slot privacy levels of a channel. Ratios against a zero
// entry are infinite unless the competing entry is zero too (such outputs
// are unreachable under both inputs and drop out).
struct LdpAudit {
  // max over event-row pairs (i, k) and columns j of log(c_ij / c_kj).
  double eps_size_realized = 0.0;
  // Twice the worst single-column log-ratio between an event row and the
  // null row, in either direction: the timing budget splits equally over
  // the two slots in which timing-adjacent prefixes differ.
  double eps_timing_realized = 0.0;
  // max over all row pairs including the null row; equals
  // max(eps_size_realized, eps_timing_realized / 2).
  double ldp_level_realized = 0.0;
  LdpWitness size_witness;
  LdpWitness timing_witness;

  bool satisfies(const PrivacyBudget& budget) const {
    return eps_size_realized <= budget.eps_size() + kLogTolerance &&
           eps_timing_realized <= budget.eps_timing() + kLogTolerance;
  }
};

LdpAudit ldp_level(const ChannelMatrix& channel);

enum class AdjacencyKind {
  // Prefix pairs differing in the size of one event packet.
  kPacketSize,
  // Prefix pairs in which one event packet moved to a different slot.
  kPacketTiming,
};

const char* to_string(AdjacencyKind kind);

struct StreamDpAudit {
  int horizon = 0;
  AdjacencyKind adjacency_kind = AdjacencyKind::kPacketSize;
  double max_log_ratio = 0.0;
  std::vector<std::int64_t> witness_stream;
  std::vector<std::int64_t> witness_adjacent;
  std::vector<std::int64_t> witness_output;
  std::uint64_t pairs_enumerated = 0;
  std::uint64_t outputs_enumerated = 0;
};

// Exhaustive worst-case audit over every adjacent prefix pair of the given
// kind and every output sequence reachable under at least one of the pair.
// Output branches that can no longer beat the running maximum are pruned.
// Throws EnumerationLimitError when the search space exceeds `budget_terms`.
StreamDpAudit audit_stream_dp(const shaping::Mechanism& mechanism, int horizon,
                              AdjacencyKind kind,
                              std::uint64_t budget_terms = 10'000'000);

}  // namespace dpshape::privacy

#endif  // DPSHAPE_PRIVACY_HPP_
