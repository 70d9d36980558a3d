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

#ifndef DPSHAPE_CORE_HPP_
#define DPSHAPE_CORE_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpshape {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Tolerance for probability-simplex membership checks. Double-precision
// accumulation over at most a few dozen entries stays well inside this.
inline constexpr double kProbTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Raised when a queueing analysis is requested for a drift that cannot
// reach a stationary regime (mean increment >= 0).
class InstabilityError : public Error {
 public:
  using Error::Error;
};

// Raised when a requested accuracy cannot be met within configured limits.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

// Merging per-device distributions can exceed the one-packet-per-slot model.
class SaturationError : public Error {
 public:
  using Error::Error;
};

class CollisionError : public Error {
 public:
  using Error::Error;
};

// Ordered set of packet sizes in bytes. The first symbol is always the
// null size 0 (no packet in a slot); event sizes follow strictly increasing.
class PacketAlphabet {
 public:
  explicit PacketAlphabet(std::vector<std::int64_t> sizes);

  const std::vector<std::int64_t>& sizes() const { return sizes_; }
  int count() const { return static_cast<int>(sizes_.size()); }
  int event_count() const { return count() - 1; }
  std::int64_t size_at(int index) const { return sizes_.at(index); }
  std::int64_t max_size() const { return sizes_.back(); }

  bool contains(std::int64_t size) const;
  // Index of `size` in the alphabet; throws InvalidArgumentError if absent.
  int index_of(std::int64_t size) const;

  friend bool operator==(const PacketAlphabet&, const PacketAlphabet&) = default;

 private:
  std::vector<std::int64_t> sizes_;
};

// Probability vector over a PacketAlphabet.
class Pmf {
 public:
  Pmf(PacketAlphabet alphabet, std::vector<double> probs);

  static Pmf point_mass(PacketAlphabet alphabet, std::int64_t size);

  const PacketAlphabet& alphabet() const { return alphabet_; }
  const std::vector<double>& probs() const { return probs_; }
  int count() const { return static_cast<int>(probs_.size()); }
  double prob_at(int index) const { return probs_.at(index); }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  PacketAlphabet alphabet_;
  std::vector<double> probs_;
};

// Right-stochastic conditional distribution from input sizes to output
// sizes. Output alphabets may differ from the input as long as the largest
// output size covers the largest input size.
class ChannelMatrix {
 public:
  ChannelMatrix(PacketAlphabet input_alphabet, PacketAlphabet output_alphabet,
                std::vector<std::vector<double>> rows);

  static ChannelMatrix identity(const PacketAlphabet& alphabet);
  // All rows equal to `output_pmf`: the output is drawn independently of
  // the input.
  static ChannelMatrix rank_one(PacketAlphabet input_alphabet,
                                const Pmf& output_pmf);

  const PacketAlphabet& input_alphabet() const { return input_alphabet_; }
  const PacketAlphabet& output_alphabet() const { return output_alphabet_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  double at(int input_index, int output_index) const {
    return rows_.at(input_index).at(output_index);
  }
  int input_count() const { return input_alphabet_.count(); }
  int output_count() const { return output_alphabet_.count(); }

  // Row `input_index` as a Pmf over the output alphabet.
  Pmf row_pmf(int input_index) const;

  friend bool operator==(const ChannelMatrix&, const ChannelMatrix&) = default;

 private:
  PacketAlphabet input_alphabet_;
  PacketAlphabet output_alphabet_;
  std::vector<std::vector<double>> rows_;
};

// Time-slotted sequence of packet sizes; 0 encodes an empty slot.
class PacketStream {
 public:
  explicit PacketStream(std::vector<std::int64_t> slots,
                        double slot_duration_s = 1.0,
                        std::optional<PacketAlphabet> alphabet = std::nullopt);

  const std::vector<std::int64_t>& slots() const { return slots_; }
  std::int64_t slot_at(std::size_t t) const { return slots_.at(t); }
  std::size_t length() const { return slots_.size(); }
  double slot_duration_s() const { return slot_duration_s_; }
  const std::optional<PacketAlphabet>& alphabet() const { return alphabet_; }

  std::int64_t total_bytes() const;
  // Number of slots carrying an event packet (size > 0).
  std::size_t event_count() const;

 private:
  std::vector<std::int64_t> slots_;
  double slot_duration_s_;
  std::optional<PacketAlphabet> alphabet_;
};

// Per-kind privacy budgets; infinity means "no constraint".
class PrivacyBudget {
 public:
  PrivacyBudget(double eps_size, double eps_timing);

  static PrivacyBudget unconstrained() {
    return PrivacyBudget(kInfinity, kInfinity);
  }

  double eps_size() const { return eps_size_; }
  double eps_timing() const { return eps_timing_; }
  bool size_finite() const { return eps_size_ < kInfinity; }
  bool timing_finite() const { return eps_timing_ < kInfinity; }
  // The per-slot channel bound implied by the two stream-level budgets.
  double ldp_level() const {
    return std::max(eps_size_, eps_timing_ / 2.0);
  }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  double eps_size_;
  double eps_timing_;
};

// Fraction of slots carrying an event packet: 1 - p(null).
double arrival_rate(const Pmf& pmf);

// Expected input bytes per slot.
double input_byte_rate(const Pmf& pmf);

// Expected output bytes per slot for each mechanism family.
double output_byte_rate_dps(const Pmf& lambda, const ChannelMatrix& channel);
double output_byte_rate_pst(const Pmf& output_pmf);
double output_byte_rate_pps(const Pmf& lambda, const Pmf& output_pmf);

// Input byte rate divided by output byte rate.
double transmission_efficiency(double b_in, double b_out);

// The queue stays bounded iff the input byte rate is strictly below the
// output byte rate.
bool check_stability(double b_in, double b_out);

// Marginal output distribution of a channel under input distribution
// `lambda` (the row mixture).
Pmf output_distribution(const Pmf& lambda, const ChannelMatrix& channel);

}  // namespace dpshape

#endif  // DPSHAPE_CORE_HPP_
