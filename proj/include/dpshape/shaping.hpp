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

#ifndef DPSHAPE_SHAPING_HPP_
#define DPSHAPE_SHAPING_HPP_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "dpshape/core.hpp"

namespace dpshape::shaping {

enum class MechanismKind {
  kDps,      // channel-based shaper: departure drawn from the arrival's row
  kPst,      // input-independent shaper: departure drawn every slot
  kPps,      // timing-preserving shaper: departure drawn only on arrivals
  kPstStar,  // constant-size departure every slot
  kPpsStar,  // constant-size departure on arrivals only
  kPst0,     // pad-only: largest input size every slot
  kPps0,     // pad-only: largest input size on arrivals only
};

const char* to_string(MechanismKind kind);

// Seedable generator used by all sampling paths. Departure sizes are drawn
// by inverse-CDF over the relevant probability row: a single uniform in
// [0, 1) is mapped through the cumulative distribution.
class SlotRng {
 public:
  explicit SlotRng(std::uint64_t seed) : engine_(seed) {}
  double next_uniform();

 private:
  std::mt19937_64 engine_;
};

// A shaping policy: one of the mechanism kinds above together with its
// parameters. Immutable; sampling state lives in the caller-owned SlotRng.
class Mechanism {
 public:
  static Mechanism dps(ChannelMatrix channel, std::uint64_t seed = 0);
  static Mechanism pst(PacketAlphabet input_alphabet, Pmf output_pmf,
                       std::uint64_t seed = 0);
  static Mechanism pps(PacketAlphabet input_alphabet, Pmf output_pmf,
                       std::uint64_t seed = 0);
  static Mechanism pst_star(PacketAlphabet input_alphabet,
                            std::int64_t constant_size, std::uint64_t seed = 0);
  static Mechanism pps_star(PacketAlphabet input_alphabet,
                            std::int64_t constant_size, std::uint64_t seed = 0);
  static Mechanism pst0(PacketAlphabet input_alphabet, std::uint64_t seed = 0);
  static Mechanism pps0(PacketAlphabet input_alphabet, std::uint64_t seed = 0);

  MechanismKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const PacketAlphabet& input_alphabet() const { return input_alphabet_; }
  // Present for kDps only.
  const ChannelMatrix& channel() const;
  // Present for kPst / kPps only.
  const Pmf& output_pmf() const;
  // Present for starred and pad-only kinds only.
  std::int64_t constant_size() const;

  // Conditional departure distribution for a given arrival size, as
  // (size, probability) pairs with positive probability. This is the
  // single-slot law of the mechanism.
  std::vector<std::pair<std::int64_t, double>> departure_law(
      std::int64_t arrival_size) const;

  // Expected departure bytes per slot under arrival distribution `lambda`.
  double output_byte_rate(const Pmf& lambda) const;

 private:
  Mechanism(MechanismKind kind, PacketAlphabet input_alphabet,
            std::uint64_t seed);

  MechanismKind kind_;
  PacketAlphabet input_alphabet_;
  std::uint64_t seed_;
  std::optional<ChannelMatrix> channel_;
  std::optional<Pmf> output_pmf_;
  std::int64_t constant_size_ = 0;
};

// Draws one departure size for the given arrival. Deterministic given the
// mechanism, the arrival and the generator state. Mechanisms that ignore
// the slot (kPps on an empty slot, constant kinds) consume no randomness.
std::int64_t sample_departure_size(const Mechanism& mechanism,
                                   std::int64_t arrival_size, SlotRng& rng);

// One step of the backlog recursion: max(q_prev + arrival - departure, 0).
std::int64_t lindley_step(std::int64_t q_prev, std::int64_t arrival,
                          std::int64_t departure);

struct ShapingReport {
  double avg_queue_bytes = 0.0;
  // Mean over event packets whose final byte departed within the run.
  double avg_delay_slots = 0.0;
  double empirical_b_in = 0.0;
  double empirical_b_out = 0.0;
  double empirical_rho = 0.0;
  std::int64_t dummy_bytes_total = 0;
  std::int64_t total_input_bytes = 0;
  std::int64_t total_output_bytes = 0;
  std::int64_t final_backlog_bytes = 0;
  std::uint64_t slots_simulated = 0;
  std::uint64_t packets_arrived = 0;
  std::uint64_t packets_completed = 0;
  // Empirical read of the stability condition b_in < b_out.
  bool stable_config = false;
};

struct ShapingResult {
  PacketStream output;
  ShapingReport report;
  // Backlog after each departure, one entry per slot.
  std::vector<std::int64_t> queue_trace;
};

// Runs the FCFS shaping queue over the whole input stream: enqueue the
// arrival, draw a departure size, serve that many bytes in arrival order
// (padding with dummy bytes when the backlog is short). A packet's delay is
// the slot of its last served byte minus its arrival slot.
ShapingResult shape_stream(const PacketStream& input,
                           const Mechanism& mechanism);

// The channel of a zero-delay shaper (departure always covers the arrival)
// at the given budget, over output alphabet equal to `alphabet`:
//   - any finite timing budget collapses every row to the largest size;
//   - infinite timing with finite size budget frees only the null row;
//   - fully unconstrained budgets admit the identity channel.
ChannelMatrix make_pad_only_channel(const PacketAlphabet& alphabet,
                                    const PrivacyBudget& budget);

}  // namespace dpshape::shaping

#endif  // DPSHAPE_SHAPING_HPP_
