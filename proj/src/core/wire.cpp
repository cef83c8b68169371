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

#include "core/wire.hpp"

#include <bit>
#include <cstring>

namespace pufsim {

namespace {
constexpr std::size_t kHeaderBytes = 1 + 16 + 4;
constexpr std::uint32_t kMaxPayload = 16u << 20;
}  // namespace

Bytes encode_message(const ProtocolMessage& message) {
  if (message.payload.size() > kMaxPayload)
    throw Error(ErrorCode::InvalidArgument, "payload too large");
  Bytes out;
  out.reserve(kHeaderBytes + message.payload.size());
  out.push_back(static_cast<std::uint8_t>(message.kind));
  out.insert(out.end(), message.session_id.begin(), message.session_id.end());
  const auto len = static_cast<std::uint32_t>(message.payload.size());
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.insert(out.end(), message.payload.begin(), message.payload.end());
  return out;
}

ProtocolMessage decode_message(std::span<const std::uint8_t> wire) {
  if (wire.size() < kHeaderBytes)
    throw Error(ErrorCode::ShapeMismatch, "wire message shorter than header");
  const std::uint8_t kind = wire[0];
  if (kind < 1 || kind > 5)
    throw Error(ErrorCode::ShapeMismatch, "unknown message kind");
  ProtocolMessage message;
  message.kind = static_cast<MessageKind>(kind);
  std::memcpy(message.session_id.data(), wire.data() + 1, 16);
  const std::uint32_t len = (static_cast<std::uint32_t>(wire[17]) << 24) |
                            (static_cast<std::uint32_t>(wire[18]) << 16) |
                            (static_cast<std::uint32_t>(wire[19]) << 8) |
                            static_cast<std::uint32_t>(wire[20]);
  if (len > kMaxPayload)
    throw Error(ErrorCode::ShapeMismatch, "payload length too large");
  if (wire.size() != kHeaderBytes + len)
    throw Error(ErrorCode::ShapeMismatch, "payload length mismatch");
  message.payload.assign(wire.begin() + kHeaderBytes, wire.end());
  return message;
}

void ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 24));
  out_.push_back(static_cast<std::uint8_t>(v >> 16));
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::bytes(std::span<const std::uint8_t> data) {
  u32(static_cast<std::uint32_t>(data.size()));
  out_.insert(out_.end(), data.begin(), data.end());
}

void ByteWriter::session_id(const SessionId& sid) {
  out_.insert(out_.end(), sid.begin(), sid.end());
}

void ByteWriter::u16_vector(std::span<const std::uint16_t> values) {
  u32(static_cast<std::uint32_t>(values.size()));
  for (std::uint16_t v : values) u16(v);
}

void ByteWriter::f64_vector(std::span<const double> values) {
  u32(static_cast<std::uint32_t>(values.size()));
  for (double v : values) f64(v);
}

void ByteReader::need(std::size_t n) const {
  if (pos_ + n > data_.size())
    throw Error(ErrorCode::ShapeMismatch, "payload truncated");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  std::uint16_t v = (static_cast<std::uint16_t>(data_[pos_]) << 8) |
                    data_[pos_ + 1];
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 8;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

SessionId ByteReader::session_id() {
  need(16);
  SessionId sid;
  std::memcpy(sid.data(), data_.data() + pos_, 16);
  pos_ += 16;
  return sid;
}

std::vector<std::uint16_t> ByteReader::u16_vector() {
  const std::uint32_t count = u32();
  if (count > kMaxPayload / 2)
    throw Error(ErrorCode::ShapeMismatch, "vector length too large");
  need(static_cast<std::size_t>(count) * 2);
  std::vector<std::uint16_t> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(u16());
  return out;
}

std::vector<double> ByteReader::f64_vector() {
  const std::uint32_t count = u32();
  if (count > kMaxPayload / 8)
    throw Error(ErrorCode::ShapeMismatch, "vector length too large");
  need(static_cast<std::size_t>(count) * 8);
  std::vector<double> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(f64());
  return out;
}

}  // namespace pufsim
