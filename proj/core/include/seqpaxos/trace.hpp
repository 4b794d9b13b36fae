// Copyright 2026 The seqpaxos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seqpaxos/types.hpp"

namespace seqpaxos {

/// One trace line:
///   t=<time> <kind> <from>-><to> <payload> | <digest>
/// Endpoints are p<id>, k<id> (clients), "*" (broadcast) or "-" (none).
struct TraceRecord {
  Time t = 0;
  std::string kind;
  std::string from;
  std::string to;
  std::string payload;
  std::string digest;  // 8 hex digits of the acting process's state

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header lines ("# key value") followed by records.
struct Trace {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<TraceRecord> records;

  std::optional<std::string> header_value(std::string_view key) const;
  void set_header(std::string key, std::string value);
};

inline constexpr std::string_view kNoDigest = "--------";

std::string render(const TraceRecord& r);
std::string render(const Trace& trace);
TraceRecord parse_record(std::string_view line);
Trace parse_trace(std::string_view text);

// Payload helpers shared by the simulator and the checker.

/// Value of `key=` inside a payload, up to the next ',', '}' or space at
/// nesting depth zero.
std::optional<std::string> payload_field(std::string_view payload, std::string_view key);
/// Leading "c<config>" token of a payload.
std::optional<ConfigId> payload_config(std::string_view payload);
/// Payload with the leading config token removed.
std::string_view payload_rest(std::string_view payload);
/// First word of a payload after the config token.
std::string_view payload_head(std::string_view payload);

Round parse_round(std::string_view text);
std::optional<ProcessId> parse_process(std::string_view text);
std::vector<ProcessId> parse_process_list(std::string_view text);
std::string render_process_list(const std::vector<ProcessId>& ps);

}  // namespace seqpaxos
