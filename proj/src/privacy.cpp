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

#include "dpshape/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace dpshape::privacy {

namespace {

// log(a/b) with the zero conventions used throughout the audits: 0/0 is
// signalled separately by callers, one-sided zeros are infinite.
double log_ratio(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::log(a / b);
  return kInfinity;
}

}  // namespace

const char* to_string(AdjacencyKind kind) {
  return kind == AdjacencyKind::kPacketSize ? "packet_size" : "packet_timing";
}

LdpAudit ldp_level(const ChannelMatrix& channel) {
  const int n = channel.input_count();
  const int m = channel.output_count();
  LdpAudit audit;
  audit.eps_size_realized = 0.0;
  double worst_timing_half = 0.0;

  for (int j = 0; j < m; ++j) {
    for (int i = 1; i < n; ++i) {
      const double cij = channel.at(i, j);
      // Event-row pairs (size kind).
      for (int k = 1; k < n; ++k) {
        if (i == k) continue;
        const double ckj = channel.at(k, j);
        if (cij == 0.0 && ckj == 0.0) continue;
        const double r = log_ratio(cij, ckj);
        if (r > audit.eps_size_realized) {
          audit.eps_size_realized = r;
          audit.size_witness = {i, k, j};
        }
      }
      // Event row against the null row (timing kind, both directions).
      const double c0j = channel.at(0, j);
      if (cij == 0.0 && c0j == 0.0) continue;
      const double r = std::max(log_ratio(cij, c0j), log_ratio(c0j, cij));
      if (r > worst_timing_half) {
        worst_timing_half = r;
        audit.timing_witness = {i, 0, j};
      }
    }
  }
  audit.eps_timing_realized = 2.0 * worst_timing_half;
  audit.ldp_level_realized =
      std::max(audit.eps_size_realized, worst_timing_half);
  return audit;
}

namespace {

using Law = std::map<std::int64_t, double>;

struct SlotPair {
  std::vector<std::int64_t> candidates;  // union of the two supports
  std::vector<double> p;                 // probability under the base prefix
  std::vector<double> q;                 // probability under the adjacent one
  double max_abs_log = 0.0;              // over two-sided candidates
  bool has_one_sided = false;
};

SlotPair make_slot_pair(const Law& p_law, const Law& q_law) {
  SlotPair slot;
  for (const auto& [size, prob] : p_law) {
    slot.candidates.push_back(size);
    slot.p.push_back(prob);
    auto it = q_law.find(size);
    slot.q.push_back(it == q_law.end() ? 0.0 : it->second);
  }
  for (const auto& [size, prob] : q_law) {
    if (p_law.count(size) > 0) continue;
    slot.candidates.push_back(size);
    slot.p.push_back(0.0);
    slot.q.push_back(prob);
  }
  for (std::size_t c = 0; c < slot.candidates.size(); ++c) {
    if (slot.p[c] > 0.0 && slot.q[c] > 0.0) {
      slot.max_abs_log =
          std::max(slot.max_abs_log, std::abs(std::log(slot.p[c] / slot.q[c])));
    } else {
      slot.has_one_sided = true;
    }
  }
  return slot;
}

class PairAuditor {
 public:
  PairAuditor(const std::vector<SlotPair>& slots, double running_max)
      : slots_(slots), best_(running_max) {
    remaining_bound_.assign(slots.size() + 1, 0.0);
    for (int t = static_cast<int>(slots.size()) - 1; t >= 0; --t) {
      // One-sided candidates can blow the ratio up to infinity, so such
      // slots defeat any pruning bound.
      remaining_bound_[t] =
          slots[t].has_one_sided
              ? kInfinity
              : remaining_bound_[t + 1] + slots[t].max_abs_log;
    }
    output_.assign(slots.size(), 0);
  }

  // Returns the max |log ratio| over output sequences; fills `witness` with
  // the maximising output when the bound improves on the running max.
  double run(std::vector<std::int64_t>* witness, std::uint64_t* visited) {
    witness_ = witness;
    visited_ = visited;
    recurse(0, 0.0);
    return best_;
  }

 private:
  void recurse(std::size_t t, double partial_log) {
    if (std::isinf(best_)) return;
    if (t == slots_.size()) {
      ++*visited_;
      const double value = std::abs(partial_log);
      if (value > best_) {
        best_ = value;
        *witness_ = output_;
      }
      return;
    }
    // Even the most favourable completion cannot beat the current best.
    if (std::abs(partial_log) + remaining_bound_[t] <= best_) return;
    const SlotPair& slot = slots_[t];
    for (std::size_t c = 0; c < slot.candidates.size(); ++c) {
      const double p = slot.p[c];
      const double q = slot.q[c];
      if (p == 0.0 && q == 0.0) continue;  // unreachable under both
      output_[t] = slot.candidates[c];
      if (p == 0.0 || q == 0.0) {
        best_ = kInfinity;
        *witness_ = output_;
        return;
      }
      recurse(t + 1, partial_log + std::log(p / q));
    }
  }

  const std::vector<SlotPair>& slots_;
  std::vector<double> remaining_bound_;
  std::vector<std::int64_t> output_;
  std::vector<std::int64_t>* witness_ = nullptr;
  std::uint64_t* visited_ = nullptr;
  double best_;
};

}  // namespace

StreamDpAudit audit_stream_dp(const shaping::Mechanism& mechanism, int horizon,
                              AdjacencyKind kind, std::uint64_t budget_terms) {
  if (horizon < (kind == AdjacencyKind::kPacketTiming ? 2 : 1)) {
    throw InvalidArgumentError(
        "audit_stream_dp: horizon too short for the adjacency kind");
  }
  const PacketAlphabet& alphabet = mechanism.input_alphabet();
  const int symbols = alphabet.count();

  // Per-arrival single-slot law, cached by input index.
  std::vector<Law> laws(symbols);
  std::size_t output_symbols = 0;
  for (int i = 0; i < symbols; ++i) {
    for (const auto& [size, prob] : mechanism.departure_law(alphabet.size_at(i))) {
      laws[i][size] += prob;
    }
    output_symbols = std::max(output_symbols, laws[i].size());
  }

  // Coarse size check before enumerating anything.
  long double terms = 1.0L;
  for (int t = 0; t < horizon; ++t) terms *= symbols;
  long double outputs = 1.0L;
  for (int t = 0; t < horizon; ++t) outputs *= static_cast<int>(output_symbols);
  if (terms * outputs > static_cast<long double>(budget_terms)) {
    throw EnumerationLimitError(
        "audit_stream_dp: |A|^T * |D|^T exceeds the enumeration budget");
  }

  StreamDpAudit audit;
  audit.horizon = horizon;
  audit.adjacency_kind = kind;
  audit.max_log_ratio = 0.0;

  std::vector<int> base(horizon, 0);
  std::vector<std::int64_t> stream_a(horizon), stream_b(horizon);

  auto audit_pair = [&](const std::vector<int>& a_idx,
                        const std::vector<int>& b_idx) {
    ++audit.pairs_enumerated;
    std::vector<SlotPair> slots;
    slots.reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
      slots.push_back(make_slot_pair(laws[a_idx[t]], laws[b_idx[t]]));
    }
    std::vector<std::int64_t> witness;
    PairAuditor auditor(slots, audit.max_log_ratio);
    const double value = auditor.run(&witness, &audit.outputs_enumerated);
    if (value > audit.max_log_ratio) {
      audit.max_log_ratio = value;
      for (int t = 0; t < horizon; ++t) {
        stream_a[t] = alphabet.size_at(a_idx[t]);
        stream_b[t] = alphabet.size_at(b_idx[t]);
      }
      audit.witness_stream = stream_a;
      audit.witness_adjacent = stream_b;
      audit.witness_output = witness;
    }
  };

  // Enumerate all index vectors of length `horizon`.
  std::vector<int> a_idx(horizon, 0);
  std::vector<int> b_idx(horizon, 0);
  const std::uint64_t total_base = [&] {
    std::uint64_t v = 1;
    for (int t = 0; t < horizon; ++t) v *= symbols;
    return v;
  }();

  for (std::uint64_t code = 0; code < total_base; ++code) {
    std::uint64_t rest = code;
    for (int t = 0; t < horizon; ++t) {
      a_idx[t] = static_cast<int>(rest % symbols);
      rest /= symbols;
    }
    if (kind == AdjacencyKind::kPacketSize) {
      // One slot with both sizes positive and different.
      for (int t = 0; t < horizon; ++t) {
        if (a_idx[t] == 0) continue;
        for (int k = 1; k < symbols; ++k) {
          if (k == a_idx[t]) continue;
          b_idx = a_idx;
          b_idx[t] = k;
          audit_pair(a_idx, b_idx);
        }
      }
    } else {
      // One event moved between two slots: the base has the event at t and
      // silence at s; the adjacent prefix swaps them.
      for (int t = 0; t < horizon; ++t) {
        if (a_idx[t] == 0) continue;
        for (int s = 0; s < horizon; ++s) {
          if (s == t || a_idx[s] != 0) continue;
          b_idx = a_idx;
          b_idx[t] = 0;
          b_idx[s] = a_idx[t];
          audit_pair(a_idx, b_idx);
        }
      }
    }
  }
  return audit;
}

}  // namespace dpshape::privacy
