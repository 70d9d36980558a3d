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

#include "dpshape/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dpshape {

namespace {

void check_probability_vector(const std::vector<double>& probs,
                              const std::string& what) {
  if (probs.empty()) {
    throw InvalidArgumentError(what + ": empty probability vector");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgumentError(what + ": probability " + std::to_string(p) +
                                 " outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    throw InvalidArgumentError(what + ": probabilities sum to " +
                               std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

PacketAlphabet::PacketAlphabet(std::vector<std::int64_t> sizes)
    : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw InvalidArgumentError(
        "PacketAlphabet: need the null size plus at least one event size");
  }
  if (sizes_.front() != 0) {
    throw InvalidArgumentError("PacketAlphabet: first size must be 0");
  }
  for (std::size_t i = 1; i < sizes_.size(); ++i) {
    if (sizes_[i] <= sizes_[i - 1]) {
      throw InvalidArgumentError(
          "PacketAlphabet: sizes must be strictly increasing");
    }
  }
}

bool PacketAlphabet::contains(std::int64_t size) const {
  return std::binary_search(sizes_.begin(), sizes_.end(), size);
}

int PacketAlphabet::index_of(std::int64_t size) const {
  auto it = std::lower_bound(sizes_.begin(), sizes_.end(), size);
  if (it == sizes_.end() || *it != size) {
    throw InvalidArgumentError("PacketAlphabet: size " + std::to_string(size) +
                               " not in alphabet");
  }
  return static_cast<int>(it - sizes_.begin());
}

Pmf::Pmf(PacketAlphabet alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  if (probs_.size() != static_cast<std::size_t>(alphabet_.count())) {
    throw InvalidArgumentError("Pmf: probs length must match alphabet length");
  }
  check_probability_vector(probs_, "Pmf");
}

Pmf Pmf::point_mass(PacketAlphabet alphabet, std::int64_t size) {
  std::vector<double> probs(alphabet.count(), 0.0);
  probs[alphabet.index_of(size)] = 1.0;
  return Pmf(std::move(alphabet), std::move(probs));
}

ChannelMatrix::ChannelMatrix(PacketAlphabet input_alphabet,
                             PacketAlphabet output_alphabet,
                             std::vector<std::vector<double>> rows)
    : input_alphabet_(std::move(input_alphabet)),
      output_alphabet_(std::move(output_alphabet)),
      rows_(std::move(rows)) {
  if (output_alphabet_.max_size() < input_alphabet_.max_size()) {
    throw InvalidArgumentError(
        "ChannelMatrix: largest output size must cover the largest input "
        "size");
  }
  if (rows_.size() != static_cast<std::size_t>(input_alphabet_.count())) {
    throw InvalidArgumentError("ChannelMatrix: one row per input size needed");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != static_cast<std::size_t>(output_alphabet_.count())) {
      throw InvalidArgumentError(
          "ChannelMatrix: row " + std::to_string(i) +
          " length must match the output alphabet");
    }
    check_probability_vector(rows_[i], "ChannelMatrix row " + std::to_string(i));
  }
}

ChannelMatrix ChannelMatrix::identity(const PacketAlphabet& alphabet) {
  const int n = alphabet.count();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) rows[i][i] = 1.0;
  return ChannelMatrix(alphabet, alphabet, std::move(rows));
}

ChannelMatrix ChannelMatrix::rank_one(PacketAlphabet input_alphabet,
                                      const Pmf& output_pmf) {
  std::vector<std::vector<double>> rows(input_alphabet.count(),
                                        output_pmf.probs());
  return ChannelMatrix(std::move(input_alphabet), output_pmf.alphabet(),
                       std::move(rows));
}

Pmf ChannelMatrix::row_pmf(int input_index) const {
  return Pmf(output_alphabet_, rows_.at(input_index));
}

PacketStream::PacketStream(std::vector<std::int64_t> slots,
                           double slot_duration_s,
                           std::optional<PacketAlphabet> alphabet)
    : slots_(std::move(slots)),
      slot_duration_s_(slot_duration_s),
      alphabet_(std::move(alphabet)) {
  if (!(slot_duration_s_ > 0.0)) {
    throw InvalidArgumentError("PacketStream: slot duration must be positive");
  }
  for (std::int64_t s : slots_) {
    if (s < 0) {
      throw InvalidArgumentError("PacketStream: negative slot value");
    }
    if (alphabet_ && s != 0 && !alphabet_->contains(s)) {
      throw InvalidArgumentError("PacketStream: slot value " +
                                 std::to_string(s) +
                                 " not in the declared alphabet");
    }
  }
}

std::int64_t PacketStream::total_bytes() const {
  return std::accumulate(slots_.begin(), slots_.end(), std::int64_t{0});
}

std::size_t PacketStream::event_count() const {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(),
                    [](std::int64_t s) { return s > 0; }));
}

PrivacyBudget::PrivacyBudget(double eps_size, double eps_timing)
    : eps_size_(eps_size), eps_timing_(eps_timing) {
  if (std::isnan(eps_size_) || std::isnan(eps_timing_) || eps_size_ < 0.0 ||
      eps_timing_ < 0.0) {
    throw InvalidArgumentError(
        "PrivacyBudget: budgets must be nonnegative (infinity allowed)");
  }
}

double arrival_rate(const Pmf& pmf) { return 1.0 - pmf.prob_at(0); }

double input_byte_rate(const Pmf& pmf) {
  double rate = 0.0;
  for (int i = 0; i < pmf.count(); ++i) {
    rate += pmf.prob_at(i) * static_cast<double>(pmf.alphabet().size_at(i));
  }
  return rate;
}

double output_byte_rate_dps(const Pmf& lambda, const ChannelMatrix& channel) {
  if (lambda.alphabet() != channel.input_alphabet()) {
    throw InvalidArgumentError(
        "output_byte_rate_dps: input distribution alphabet does not match "
        "the channel input alphabet");
  }
  double rate = 0.0;
  for (int i = 0; i < channel.input_count(); ++i) {
    double row_mean = 0.0;
    for (int j = 0; j < channel.output_count(); ++j) {
      row_mean += channel.at(i, j) *
                  static_cast<double>(channel.output_alphabet().size_at(j));
    }
    rate += lambda.prob_at(i) * row_mean;
  }
  return rate;
}

double output_byte_rate_pst(const Pmf& output_pmf) {
  return input_byte_rate(output_pmf);
}

double output_byte_rate_pps(const Pmf& lambda, const Pmf& output_pmf) {
  return arrival_rate(lambda) * input_byte_rate(output_pmf);
}

double transmission_efficiency(double b_in, double b_out) {
  if (!(b_out > 0.0)) {
    throw InvalidArgumentError(
        "transmission_efficiency: undefined for zero output byte rate");
  }
  return b_in / b_out;
}

bool check_stability(double b_in, double b_out) { return b_in < b_out; }

Pmf output_distribution(const Pmf& lambda, const ChannelMatrix& channel) {
  if (lambda.alphabet() != channel.input_alphabet()) {
    throw InvalidArgumentError(
        "output_distribution: input distribution alphabet does not match "
        "the channel input alphabet");
  }
  std::vector<double> probs(channel.output_count(), 0.0);
  for (int i = 0; i < channel.input_count(); ++i) {
    for (int j = 0; j < channel.output_count(); ++j) {
      probs[j] += lambda.prob_at(i) * channel.at(i, j);
    }
  }
  // Guard against accumulated rounding pushing an entry a hair outside [0,1].
  for (double& p : probs) p = std::clamp(p, 0.0, 1.0);
  return Pmf(channel.output_alphabet(), std::move(probs));
}

}  // namespace dpshape
