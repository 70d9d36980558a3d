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

#include "dpshape/shaping.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace dpshape::shaping {

namespace {

// Inverse-CDF draw over a probability row: the uniform is mapped through
// the running cumulative sum; ties and rounding resolve to the last entry.
int sample_index(const std::vector<double>& probs, double u) {
  double cum = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    cum += probs[j];
    if (u < cum) return static_cast<int>(j);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

const char* to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kDps: return "dps";
    case MechanismKind::kPst: return "pst";
    case MechanismKind::kPps: return "pps";
    case MechanismKind::kPstStar: return "pst_star";
    case MechanismKind::kPpsStar: return "pps_star";
    case MechanismKind::kPst0: return "pst0";
    case MechanismKind::kPps0: return "pps0";
  }
  return "unknown";
}

double SlotRng::next_uniform() {
  // 53 random bits into [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Mechanism::Mechanism(MechanismKind kind, PacketAlphabet input_alphabet,
                     std::uint64_t seed)
    : kind_(kind), input_alphabet_(std::move(input_alphabet)), seed_(seed) {}

Mechanism Mechanism::dps(ChannelMatrix channel, std::uint64_t seed) {
  Mechanism m(MechanismKind::kDps, channel.input_alphabet(), seed);
  m.channel_ = std::move(channel);
  return m;
}

Mechanism Mechanism::pst(PacketAlphabet input_alphabet, Pmf output_pmf,
                         std::uint64_t seed) {
  Mechanism m(MechanismKind::kPst, std::move(input_alphabet), seed);
  m.output_pmf_ = std::move(output_pmf);
  return m;
}

Mechanism Mechanism::pps(PacketAlphabet input_alphabet, Pmf output_pmf,
                         std::uint64_t seed) {
  Mechanism m(MechanismKind::kPps, std::move(input_alphabet), seed);
  m.output_pmf_ = std::move(output_pmf);
  return m;
}

Mechanism Mechanism::pst_star(PacketAlphabet input_alphabet,
                              std::int64_t constant_size, std::uint64_t seed) {
  if (constant_size <= 0) {
    throw InvalidArgumentError("Mechanism: constant size must be positive");
  }
  Mechanism m(MechanismKind::kPstStar, std::move(input_alphabet), seed);
  m.constant_size_ = constant_size;
  return m;
}

Mechanism Mechanism::pps_star(PacketAlphabet input_alphabet,
                              std::int64_t constant_size, std::uint64_t seed) {
  if (constant_size <= 0) {
    throw InvalidArgumentError("Mechanism: constant size must be positive");
  }
  Mechanism m(MechanismKind::kPpsStar, std::move(input_alphabet), seed);
  m.constant_size_ = constant_size;
  return m;
}

Mechanism Mechanism::pst0(PacketAlphabet input_alphabet, std::uint64_t seed) {
  const std::int64_t top = input_alphabet.max_size();
  Mechanism m(MechanismKind::kPst0, std::move(input_alphabet), seed);
  m.constant_size_ = top;
  return m;
}

Mechanism Mechanism::pps0(PacketAlphabet input_alphabet, std::uint64_t seed) {
  const std::int64_t top = input_alphabet.max_size();
  Mechanism m(MechanismKind::kPps0, std::move(input_alphabet), seed);
  m.constant_size_ = top;
  return m;
}

const ChannelMatrix& Mechanism::channel() const {
  if (!channel_) {
    throw InvalidArgumentError("Mechanism: no channel for this kind");
  }
  return *channel_;
}

const Pmf& Mechanism::output_pmf() const {
  if (!output_pmf_) {
    throw InvalidArgumentError("Mechanism: no output distribution for this kind");
  }
  return *output_pmf_;
}

std::int64_t Mechanism::constant_size() const {
  if (constant_size_ <= 0) {
    throw InvalidArgumentError("Mechanism: no constant size for this kind");
  }
  return constant_size_;
}

std::vector<std::pair<std::int64_t, double>> Mechanism::departure_law(
    std::int64_t arrival_size) const {
  const int i = input_alphabet_.index_of(arrival_size);
  std::vector<std::pair<std::int64_t, double>> law;
  auto append_pmf = [&law](const Pmf& pmf) {
    for (int j = 0; j < pmf.count(); ++j) {
      if (pmf.prob_at(j) > 0.0) {
        law.emplace_back(pmf.alphabet().size_at(j), pmf.prob_at(j));
      }
    }
  };
  switch (kind_) {
    case MechanismKind::kDps: {
      const ChannelMatrix& c = *channel_;
      for (int j = 0; j < c.output_count(); ++j) {
        if (c.at(i, j) > 0.0) {
          law.emplace_back(c.output_alphabet().size_at(j), c.at(i, j));
        }
      }
      break;
    }
    case MechanismKind::kPst:
      append_pmf(*output_pmf_);
      break;
    case MechanismKind::kPps:
      if (arrival_size == 0) {
        law.emplace_back(0, 1.0);
      } else {
        append_pmf(*output_pmf_);
      }
      break;
    case MechanismKind::kPstStar:
    case MechanismKind::kPst0:
      law.emplace_back(constant_size_, 1.0);
      break;
    case MechanismKind::kPpsStar:
    case MechanismKind::kPps0:
      law.emplace_back(arrival_size > 0 ? constant_size_ : 0, 1.0);
      break;
  }
  return law;
}

double Mechanism::output_byte_rate(const Pmf& lambda) const {
  if (lambda.alphabet() != input_alphabet_) {
    throw InvalidArgumentError(
        "Mechanism: arrival distribution alphabet does not match");
  }
  double rate = 0.0;
  for (int i = 0; i < lambda.count(); ++i) {
    if (lambda.prob_at(i) == 0.0) continue;
    double mean = 0.0;
    for (const auto& [size, prob] : departure_law(lambda.alphabet().size_at(i))) {
      mean += prob * static_cast<double>(size);
    }
    rate += lambda.prob_at(i) * mean;
  }
  return rate;
}

std::int64_t sample_departure_size(const Mechanism& mechanism,
                                   std::int64_t arrival_size, SlotRng& rng) {
  const int i = mechanism.input_alphabet().index_of(arrival_size);
  switch (mechanism.kind()) {
    case MechanismKind::kDps: {
      const ChannelMatrix& c = mechanism.channel();
      const int j = sample_index(c.rows()[i], rng.next_uniform());
      return c.output_alphabet().size_at(j);
    }
    case MechanismKind::kPst: {
      const Pmf& mu = mechanism.output_pmf();
      return mu.alphabet().size_at(sample_index(mu.probs(), rng.next_uniform()));
    }
    case MechanismKind::kPps: {
      if (arrival_size == 0) return 0;
      const Pmf& upsilon = mechanism.output_pmf();
      return upsilon.alphabet().size_at(
          sample_index(upsilon.probs(), rng.next_uniform()));
    }
    case MechanismKind::kPstStar:
    case MechanismKind::kPst0:
      return mechanism.constant_size();
    case MechanismKind::kPpsStar:
    case MechanismKind::kPps0:
      return arrival_size > 0 ? mechanism.constant_size() : 0;
  }
  throw InvalidArgumentError("sample_departure_size: unknown mechanism kind");
}

std::int64_t lindley_step(std::int64_t q_prev, std::int64_t arrival,
                          std::int64_t departure) {
  return std::max<std::int64_t>(q_prev + arrival - departure, 0);
}

ShapingResult shape_stream(const PacketStream& input,
                           const Mechanism& mechanism) {
  struct QueuedPacket {
    std::int64_t remaining_bytes;
    std::uint64_t arrival_slot;
  };

  SlotRng rng(mechanism.seed());
  std::deque<QueuedPacket> queue;
  const std::size_t horizon = input.length();

  std::vector<std::int64_t> output_slots;
  std::vector<std::int64_t> queue_trace;
  output_slots.reserve(horizon);
  queue_trace.reserve(horizon);

  std::int64_t backlog = 0;  // starts empty
  std::int64_t total_in = 0;
  std::int64_t total_out = 0;
  std::int64_t dummy_total = 0;
  std::uint64_t packets_arrived = 0;
  std::uint64_t packets_completed = 0;
  long double queue_sum = 0.0L;
  long double delay_sum = 0.0L;

  for (std::size_t t = 0; t < horizon; ++t) {
    const std::int64_t arrival = input.slot_at(t);
    if (arrival > 0) {
      queue.push_back({arrival, t});
      ++packets_arrived;
      backlog += arrival;
      total_in += arrival;
    }

    const std::int64_t departure =
        sample_departure_size(mechanism, arrival, rng);
    if (departure > 0) {
      std::int64_t to_serve = std::min(departure, backlog);
      dummy_total += departure - to_serve;
      backlog -= to_serve;
      total_out += departure;
      while (to_serve > 0) {
        QueuedPacket& head = queue.front();
        const std::int64_t chunk = std::min(head.remaining_bytes, to_serve);
        head.remaining_bytes -= chunk;
        to_serve -= chunk;
        if (head.remaining_bytes == 0) {
          delay_sum += static_cast<long double>(t - head.arrival_slot);
          ++packets_completed;
          queue.pop_front();
        }
      }
    }

    output_slots.push_back(departure);
    queue_trace.push_back(backlog);
    queue_sum += static_cast<long double>(backlog);
  }

  ShapingReport report;
  report.slots_simulated = horizon;
  report.total_input_bytes = total_in;
  report.total_output_bytes = total_out;
  report.dummy_bytes_total = dummy_total;
  report.final_backlog_bytes = backlog;
  report.packets_arrived = packets_arrived;
  report.packets_completed = packets_completed;
  if (horizon > 0) {
    report.avg_queue_bytes = static_cast<double>(queue_sum / horizon);
    report.empirical_b_in = static_cast<double>(total_in) / horizon;
    report.empirical_b_out = static_cast<double>(total_out) / horizon;
  }
  if (packets_completed > 0) {
    report.avg_delay_slots = static_cast<double>(delay_sum / packets_completed);
  }
  if (total_out > 0) {
    report.empirical_rho =
        static_cast<double>(total_in) / static_cast<double>(total_out);
  }
  report.stable_config = check_stability(report.empirical_b_in,
                                         report.empirical_b_out);

  PacketStream output(std::move(output_slots), input.slot_duration_s());
  return ShapingResult{std::move(output), report, std::move(queue_trace)};
}

ChannelMatrix make_pad_only_channel(const PacketAlphabet& alphabet,
                                    const PrivacyBudget& budget) {
  const int n = alphabet.count();
  if (!budget.size_finite() && !budget.timing_finite()) {
    return ChannelMatrix::identity(alphabet);
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) rows[i][n - 1] = 1.0;
  if (!budget.timing_finite()) {
    // Only the null row escapes the collapse: emitting nothing on empty
    // slots keeps the zero-column ratios against event rows unconstrained.
    rows[0].assign(n, 0.0);
    rows[0][0] = 1.0;
  }
  return ChannelMatrix(alphabet, alphabet, std::move(rows));
}

}  // namespace dpshape::shaping
