/*
  Copyright (c) the pufsim authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#ifndef PUFSIM_CORE_WIRE_HPP
#define PUFSIM_CORE_WIRE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace pufsim {

enum class MessageKind : std::uint8_t {
  AuthRequestC1 = 1,
  DeviceResult = 2,
  ResponseR2 = 3,
  ServerResult = 4,
  Error = 5,
};

enum class Role : std::uint8_t { Server = 0, Device = 1, Adversary = 2 };

using SessionId = std::array<std::uint8_t, 16>;

struct ProtocolMessage {
  MessageKind kind = MessageKind::Error;
  SessionId session_id{};
  Bytes payload;  // encrypted
  Role sender = Role::Server;
};

// Wire layout: 1 byte kind, 16 bytes session id, 4-byte big-endian payload
// length, payload bytes. The sender tag is bookkeeping, not wire data.
Bytes encode_message(const ProtocolMessage& message);
ProtocolMessage decode_message(std::span<const std::uint8_t> wire);

/// Big-endian primitive writer for payload plaintext.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void bytes(std::span<const std::uint8_t> data);
  void session_id(const SessionId& sid);
  void u16_vector(std::span<const std::uint16_t> values);
  void f64_vector(std::span<const double> values);

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

/// Bounds-checked reader; short or oversized fields raise shape errors.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  SessionId session_id();
  std::vector<std::uint16_t> u16_vector();
  std::vector<double> f64_vector();
  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace pufsim

#endif
