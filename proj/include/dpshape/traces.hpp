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

#ifndef DPSHAPE_TRACES_HPP_
#define DPSHAPE_TRACES_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpshape/core.hpp"

namespace dpshape::traces {

struct TraceRecord {
  double timestamp_s = 0.0;
  std::int64_t size_bytes = 0;
};

// A raw packet capture: (timestamp, size) records with nondecreasing
// timestamps and positive sizes.
class RawTrace {
 public:
  explicit RawTrace(std::vector<TraceRecord> records);

  const std::vector<TraceRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  // Drops records whose size is not in the keep list (event-size filter).
  RawTrace filtered(const std::vector<std::int64_t>& keep_sizes) const;

 private:
  std::vector<TraceRecord> records_;
};

// Bins a trace into fixed-length slots starting at the first record.
// Multiple packets landing in one slot are summed into one aggregate size,
// so byte totals are preserved.
PacketStream discretize(const RawTrace& trace, double slot_seconds);

// Empirical slot-frequency distribution, zero slots included. The alphabet
// is inferred from the distinct values seen unless one is supplied;
// aggregate values outside a supplied alphabet are a domain error.
Pmf estimate_pmf(const PacketStream& stream,
                 const std::optional<PacketAlphabet>& alphabet = std::nullopt);

// Rank-frequency distribution over the alphabet: the i-th size has rank
// i + 1 and probability proportional to 1 / rank^s.
Pmf zipf_pmf(const PacketAlphabet& alphabet, double s);

// `horizon` i.i.d. draws from the distribution; reproducible per seed.
PacketStream synthesize_stream(const Pmf& pmf, std::size_t horizon,
                               std::uint64_t seed);

// Union of single-device distributions into one aggregate-stream
// distribution: event probabilities carry over, the null probability drops
// by the sum of the individual event rates. Event sizes must be distinct
// across devices, and the combined event rate must stay below one packet
// per slot.
Pmf merge_pmfs(const std::vector<Pmf>& entries);

// Named single-device reference distributions bundled for experiments
// ("sleep", "camera", "switch").
std::map<std::string, Pmf> reference_device_pmfs();

}  // namespace dpshape::traces

#endif  // DPSHAPE_TRACES_HPP_
