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

// Little-endian binary encoding shared by the WAL, snapshots and the
// message-size measurements. Layouts are described in docs/formats.md.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seqpaxos/message.hpp"
#include "seqpaxos/types.hpp"

namespace seqpaxos {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { fixed<4>(v); }
  void u64(std::uint64_t v) { fixed<8>(v); }
  void bytes(std::string_view s);  // u32 length prefix
  void raw(std::string_view s) { out_.append(s); }

  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }
  void clear() { out_.clear(); }

 private:
  template <int N>
  void fixed(std::uint64_t v) {
    char buf[N];
    for (int i = 0; i < N; ++i) buf[i] = static_cast<char>(v >> (8 * i));
    out_.append(buf, N);
  }

  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::string bytes();
  std::string_view raw(std::size_t n);

  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  std::string_view in_;
  std::size_t pos_ = 0;
};

void encode(Writer& w, const Round& r);
void encode(Writer& w, const LogEntry& e);
void encode(Writer& w, const StopSign& s);
void encode_entries(Writer& w, const std::vector<LogEntry>& entries);
void encode(Writer& w, const MessageBody& body);

Round decode_round(Reader& r);
LogEntry decode_entry(Reader& r);
StopSign decode_stop_sign(Reader& r);
std::vector<LogEntry> decode_entries(Reader& r);
MessageBody decode_message(Reader& r);

std::string encode_entries(const std::vector<LogEntry>& entries);
std::string encode_message(const MessageBody& body);

/// 64-bit FNV-1a, used for state digests and visited-set hashing.
class Fnv1a {
 public:
  void add(std::string_view bytes);
  void add_u64(std::uint64_t v);
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hex32(std::uint64_t digest);

}  // namespace seqpaxos
