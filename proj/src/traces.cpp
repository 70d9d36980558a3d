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

#include "dpshape/traces.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace dpshape::traces {

RawTrace::RawTrace(std::vector<TraceRecord> records)
    : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].size_bytes <= 0) {
      throw InvalidArgumentError("RawTrace: sizes must be positive");
    }
    if (i > 0 && records_[i].timestamp_s < records_[i - 1].timestamp_s) {
      throw InvalidArgumentError("RawTrace: timestamps must be nondecreasing");
    }
  }
}

RawTrace RawTrace::filtered(const std::vector<std::int64_t>& keep_sizes) const {
  std::set<std::int64_t> keep(keep_sizes.begin(), keep_sizes.end());
  std::vector<TraceRecord> kept;
  for (const TraceRecord& r : records_) {
    if (keep.count(r.size_bytes) > 0) kept.push_back(r);
  }
  return RawTrace(std::move(kept));
}

PacketStream discretize(const RawTrace& trace, double slot_seconds) {
  if (!(slot_seconds > 0.0)) {
    throw InvalidArgumentError("discretize: slot duration must be positive");
  }
  if (trace.empty()) return PacketStream({}, slot_seconds);
  const double start = trace.records().front().timestamp_s;
  std::vector<std::int64_t> slots;
  for (const TraceRecord& r : trace.records()) {
    const auto slot = static_cast<std::size_t>(
        std::floor((r.timestamp_s - start) / slot_seconds));
    if (slot >= slots.size()) slots.resize(slot + 1, 0);
    slots[slot] += r.size_bytes;
  }
  return PacketStream(std::move(slots), slot_seconds);
}

Pmf estimate_pmf(const PacketStream& stream,
                 const std::optional<PacketAlphabet>& alphabet) {
  if (stream.length() == 0) {
    throw InvalidArgumentError("estimate_pmf: empty stream");
  }
  std::map<std::int64_t, std::size_t> counts;
  counts[0] = 0;  // zero slots always belong to the support
  for (std::int64_t s : stream.slots()) ++counts[s];

  PacketAlphabet out = [&] {
    if (alphabet) return *alphabet;
    std::vector<std::int64_t> sizes;
    for (const auto& [size, count] : counts) sizes.push_back(size);
    return PacketAlphabet(std::move(sizes));
  }();

  std::vector<double> probs(out.count(), 0.0);
  for (const auto& [size, count] : counts) {
    if (!out.contains(size)) {
      throw InvalidArgumentError("estimate_pmf: stream value " +
                                 std::to_string(size) +
                                 " outside the supplied alphabet");
    }
    probs[out.index_of(size)] =
        static_cast<double>(count) / static_cast<double>(stream.length());
  }
  return Pmf(std::move(out), std::move(probs));
}

Pmf zipf_pmf(const PacketAlphabet& alphabet, double s) {
  if (!(s > 0.0)) {
    throw InvalidArgumentError("zipf_pmf: scale parameter must be positive");
  }
  std::vector<double> probs(alphabet.count());
  double norm = 0.0;
  for (int i = 0; i < alphabet.count(); ++i) {
    probs[i] = std::pow(static_cast<double>(i + 1), -s);
    norm += probs[i];
  }
  for (double& p : probs) p /= norm;
  return Pmf(alphabet, std::move(probs));
}

PacketStream synthesize_stream(const Pmf& pmf, std::size_t horizon,
                               std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<std::int64_t> slots(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    double cum = 0.0;
    int drawn = pmf.count() - 1;
    for (int i = 0; i < pmf.count(); ++i) {
      cum += pmf.prob_at(i);
      if (u < cum) {
        drawn = i;
        break;
      }
    }
    slots[t] = pmf.alphabet().size_at(drawn);
  }
  return PacketStream(std::move(slots), 1.0, pmf.alphabet());
}

Pmf merge_pmfs(const std::vector<Pmf>& entries) {
  if (entries.empty()) {
    throw InvalidArgumentError("merge_pmfs: nothing to merge");
  }
  if (entries.size() == 1) return entries.front();

  std::map<std::int64_t, double> event_probs;
  double total_rate = 0.0;
  for (const Pmf& pmf : entries) {
    for (int i = 1; i < pmf.count(); ++i) {
      const std::int64_t size = pmf.alphabet().size_at(i);
      if (event_probs.count(size) > 0) {
        throw CollisionError("merge_pmfs: event size " + std::to_string(size) +
                             " appears in more than one device");
      }
      event_probs[size] = pmf.prob_at(i);
    }
    total_rate += arrival_rate(pmf);
  }
  if (total_rate >= 1.0) {
    throw SaturationError(
        "merge_pmfs: combined arrival rate " + std::to_string(total_rate) +
        " breaks the one-packet-per-slot model");
  }

  std::vector<std::int64_t> sizes{0};
  std::vector<double> probs{1.0 - total_rate};
  for (const auto& [size, prob] : event_probs) {
    sizes.push_back(size);
    probs.push_back(prob);
  }
  return Pmf(PacketAlphabet(std::move(sizes)), std::move(probs));
}

std::map<std::string, Pmf> reference_device_pmfs() {
  std::map<std::string, Pmf> devices;
  devices.emplace("sleep", Pmf(PacketAlphabet({0, 93, 1117}),
                               {0.91, 0.08, 0.01}));
  devices.emplace("camera", Pmf(PacketAlphabet({0, 142, 270}),
                                {0.85, 0.14, 0.01}));
  devices.emplace("switch", Pmf(PacketAlphabet({0, 40, 1500}),
                                {0.69, 0.21, 0.10}));
  return devices;
}

}  // namespace dpshape::traces
