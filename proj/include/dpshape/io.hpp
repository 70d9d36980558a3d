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

#ifndef DPSHAPE_IO_HPP_
#define DPSHAPE_IO_HPP_

#include <string>

#include <json.hpp>

#include "dpshape/core.hpp"
#include "dpshape/privacy.hpp"
#include "dpshape/shaping.hpp"
#include "dpshape/traces.hpp"

namespace dpshape::io {

using json = nlohmann::json;

// {"sizes":[0,142,270],"probs":[0.85,0.14,0.01]}
json pmf_to_json(const Pmf& pmf);
Pmf pmf_from_json(const json& j);

// {"input_sizes":[...],"output_sizes":[...],"rows":[[...],...]} (row-major)
json channel_to_json(const ChannelMatrix& channel);
ChannelMatrix channel_from_json(const json& j);

// Budgets serialize infinity as the string "inf".
json budget_to_json(const PrivacyBudget& budget);
PrivacyBudget budget_from_json(const json& j);

json mechanism_to_json(const shaping::Mechanism& mechanism);
shaping::Mechanism mechanism_from_json(const json& j);

json report_to_json(const shaping::ShapingReport& report);

json ldp_audit_to_json(const privacy::LdpAudit& audit);
json stream_audit_to_json(const privacy::StreamDpAudit& audit);

// Stream CSV: header `slot,bytes`, one row per slot.
void write_stream_csv(const PacketStream& stream, const std::string& path);
PacketStream read_stream_csv(const std::string& path);

// Trace CSV: header `timestamp_s,size_bytes` required.
traces::RawTrace read_trace_csv(const std::string& path);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace dpshape::io

#endif  // DPSHAPE_IO_HPP_
