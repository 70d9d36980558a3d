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

#include "dpshape/io.hpp"

#include <fstream>
#include <sstream>

namespace dpshape::io {

namespace {

json eps_to_json(double eps) {
  if (eps == kInfinity) return json("inf");
  return json(eps);
}

double eps_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfinity;
    throw InvalidArgumentError("budget: unknown epsilon encoding '" +
                               j.get<std::string>() + "'");
  }
  return j.get<double>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
      field.pop_back();
    }
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  return fields;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open file: " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgumentError("cannot write file: " + path);
  return out;
}

}  // namespace

json pmf_to_json(const Pmf& pmf) {
  return json{{"sizes", pmf.alphabet().sizes()}, {"probs", pmf.probs()}};
}

Pmf pmf_from_json(const json& j) {
  return Pmf(PacketAlphabet(j.at("sizes").get<std::vector<std::int64_t>>()),
             j.at("probs").get<std::vector<double>>());
}

json channel_to_json(const ChannelMatrix& channel) {
  return json{{"input_sizes", channel.input_alphabet().sizes()},
              {"output_sizes", channel.output_alphabet().sizes()},
              {"rows", channel.rows()}};
}

ChannelMatrix channel_from_json(const json& j) {
  return ChannelMatrix(
      PacketAlphabet(j.at("input_sizes").get<std::vector<std::int64_t>>()),
      PacketAlphabet(j.at("output_sizes").get<std::vector<std::int64_t>>()),
      j.at("rows").get<std::vector<std::vector<double>>>());
}

json budget_to_json(const PrivacyBudget& budget) {
  return json{{"eps_size", eps_to_json(budget.eps_size())},
              {"eps_timing", eps_to_json(budget.eps_timing())}};
}

PrivacyBudget budget_from_json(const json& j) {
  return PrivacyBudget(eps_from_json(j.at("eps_size")),
                       eps_from_json(j.at("eps_timing")));
}

json mechanism_to_json(const shaping::Mechanism& mechanism) {
  json j{{"kind", shaping::to_string(mechanism.kind())},
         {"seed", mechanism.seed()}};
  switch (mechanism.kind()) {
    case shaping::MechanismKind::kDps:
      j["channel"] = channel_to_json(mechanism.channel());
      break;
    case shaping::MechanismKind::kPst:
    case shaping::MechanismKind::kPps:
      j["input_sizes"] = mechanism.input_alphabet().sizes();
      j["output_pmf"] = pmf_to_json(mechanism.output_pmf());
      break;
    case shaping::MechanismKind::kPstStar:
    case shaping::MechanismKind::kPpsStar:
      j["input_sizes"] = mechanism.input_alphabet().sizes();
      j["constant_size"] = mechanism.constant_size();
      break;
    case shaping::MechanismKind::kPst0:
    case shaping::MechanismKind::kPps0:
      j["input_sizes"] = mechanism.input_alphabet().sizes();
      break;
  }
  return j;
}

shaping::Mechanism mechanism_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  if (kind == "dps") {
    return shaping::Mechanism::dps(channel_from_json(j.at("channel")), seed);
  }
  if (kind != "pst" && kind != "pps" && kind != "pst_star" &&
      kind != "pps_star" && kind != "pst0" && kind != "pps0") {
    throw InvalidArgumentError("mechanism: unknown kind '" + kind + "'");
  }
  PacketAlphabet input(j.at("input_sizes").get<std::vector<std::int64_t>>());
  if (kind == "pst") {
    return shaping::Mechanism::pst(std::move(input),
                                   pmf_from_json(j.at("output_pmf")), seed);
  }
  if (kind == "pps") {
    return shaping::Mechanism::pps(std::move(input),
                                   pmf_from_json(j.at("output_pmf")), seed);
  }
  if (kind == "pst_star") {
    return shaping::Mechanism::pst_star(
        std::move(input), j.at("constant_size").get<std::int64_t>(), seed);
  }
  if (kind == "pps_star") {
    return shaping::Mechanism::pps_star(
        std::move(input), j.at("constant_size").get<std::int64_t>(), seed);
  }
  if (kind == "pst0") return shaping::Mechanism::pst0(std::move(input), seed);
  return shaping::Mechanism::pps0(std::move(input), seed);
}

json report_to_json(const shaping::ShapingReport& report) {
  return json{{"avg_queue_bytes", report.avg_queue_bytes},
              {"avg_delay_slots", report.avg_delay_slots},
              {"empirical_b_in", report.empirical_b_in},
              {"empirical_b_out", report.empirical_b_out},
              {"empirical_rho", report.empirical_rho},
              {"dummy_bytes_total", report.dummy_bytes_total},
              {"total_input_bytes", report.total_input_bytes},
              {"total_output_bytes", report.total_output_bytes},
              {"final_backlog_bytes", report.final_backlog_bytes},
              {"slots_simulated", report.slots_simulated},
              {"packets_arrived", report.packets_arrived},
              {"packets_completed", report.packets_completed},
              {"stable_config", report.stable_config}};
}

json ldp_audit_to_json(const privacy::LdpAudit& audit) {
  auto witness = [](const privacy::LdpWitness& w) {
    return json{{"row_i", w.row_i}, {"row_k", w.row_k}, {"col_j", w.col_j}};
  };
  return json{{"eps_size_realized", eps_to_json(audit.eps_size_realized)},
              {"eps_timing_realized", eps_to_json(audit.eps_timing_realized)},
              {"ldp_level_realized", eps_to_json(audit.ldp_level_realized)},
              {"size_witness", witness(audit.size_witness)},
              {"timing_witness", witness(audit.timing_witness)}};
}

json stream_audit_to_json(const privacy::StreamDpAudit& audit) {
  return json{{"horizon", audit.horizon},
              {"adjacency_kind", privacy::to_string(audit.adjacency_kind)},
              {"max_log_ratio", eps_to_json(audit.max_log_ratio)},
              {"witness_stream", audit.witness_stream},
              {"witness_adjacent", audit.witness_adjacent},
              {"witness_output", audit.witness_output},
              {"pairs_enumerated", audit.pairs_enumerated},
              {"outputs_enumerated", audit.outputs_enumerated}};
}

void write_stream_csv(const PacketStream& stream, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "slot,bytes\n";
  for (std::size_t t = 0; t < stream.length(); ++t) {
    out << t << ',' << stream.slot_at(t) << '\n';
  }
}

PacketStream read_stream_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::vector<std::int64_t> slots;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (first) {
      first = false;
      if (!fields.empty() && fields[0] == "slot") continue;  // header
    }
    if (fields.size() != 2) {
      throw InvalidArgumentError("stream csv: expected `slot,bytes` rows in " +
                                 path);
    }
    slots.push_back(std::stoll(fields[1]));
  }
  return PacketStream(std::move(slots));
}

traces::RawTrace read_trace_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidArgumentError("trace csv: empty file " + path);
  }
  auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "timestamp_s" ||
      header[1] != "size_bytes") {
    throw InvalidArgumentError(
        "trace csv: header `timestamp_s,size_bytes` required in " + path);
  }
  std::vector<traces::TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw InvalidArgumentError("trace csv: malformed row in " + path);
    }
    records.push_back({std::stod(fields[0]), std::stoll(fields[1])});
  }
  return traces::RawTrace(std::move(records));
}

json read_json_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
}

}  // namespace dpshape::io
