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

#include "core/puf_pki_protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "core/rng.hpp"

namespace pufsim {

namespace {

constexpr std::uint8_t kPayloadVersion = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sid_key(const SessionId& sid) {
  return std::string(reinterpret_cast<const char*>(sid.data()), sid.size());
}

AuthDecision failed_decision() {
  AuthDecision decision;
  decision.accepted = false;
  decision.distance = kInf;
  decision.threshold = 0.0;
  return decision;
}

void fail_session(AuthSession& session) {
  if (session.phase != Phase::MutualAuthed) session.phase = Phase::Failed;
}

ProtocolMessage make_error_message(AuthSession& session, Role sender,
                                   CipherSuite& cipher,
                                   std::span<const std::uint8_t> peer_pk,
                                   std::uint8_t code, const std::string& text) {
  ByteWriter w;
  w.u8(kPayloadVersion);
  w.session_id(session.id);
  w.u8(code);
  w.bytes(Bytes(text.begin(), text.end()));
  ProtocolMessage message;
  message.kind = MessageKind::Error;
  message.session_id = session.id;
  message.sender = sender;
  const Bytes plain = w.take();
  message.payload = peer_pk.empty() ? plain : cipher.encrypt(peer_pk, plain);
  session.transcript.push_back(message);
  return message;
}

std::string hex_encode(std::span<const std::uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

Bytes hex_decode(const std::string& text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (text.size() % 2 != 0)
    throw Error(ErrorCode::ConfigError, "odd-length hex string");
  Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const int hi = nibble(text[i]);
    const int lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0)
      throw Error(ErrorCode::ConfigError, "invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_challenge_fields(std::string& out, const std::string& prefix,
                            const ChallengeRecord& challenge) {
  out += prefix + ".range=" + std::to_string(challenge.range.begin) + ":" +
         std::to_string(challenge.range.end) + "\n";
  out += prefix + ".n_states=" + std::to_string(challenge.quantizer.n_states) +
         "\n";
  out += prefix + ".boundaries=";
  for (std::size_t i = 0; i < challenge.quantizer.boundaries.size(); ++i) {
    if (i) out += ',';
    out += fmt_full(challenge.quantizer.boundaries[i]);
  }
  out += "\n" + prefix + ".states=";
  for (std::size_t i = 0; i < challenge.word.states.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(challenge.word.states[i]);
  }
  out += "\n";
}

}  // namespace

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::Init: return "INIT";
    case Phase::ServerAuthed: return "SERVER_AUTHED";
    case Phase::MutualAuthed: return "MUTUAL_AUTHED";
    case Phase::Failed: return "FAILED";
  }
  return "UNKNOWN";
}

bool ReplayWindow::seen(const SessionId& sid) const {
  return set_.count(sid_key(sid)) > 0;
}

void ReplayWindow::remember(const SessionId& sid) {
  std::string key = sid_key(sid);
  if (set_.insert(key).second) {
    order_.push_back(key);
    if (order_.size() > capacity_) {
      set_.erase(order_.front());
      order_.pop_front();
    }
  }
}

Bytes serialize_challenge_payload(const SessionId& sid,
                                  const ChallengeRecord& challenge) {
  ByteWriter w;
  w.u8(kPayloadVersion);
  w.session_id(sid);
  w.u32(challenge.range.begin);
  w.u32(challenge.range.end);
  w.u16(challenge.quantizer.n_states);
  w.f64_vector(challenge.quantizer.boundaries);
  w.u16_vector(challenge.word.states);
  return w.take();
}

ChallengeRecord parse_challenge_payload(const Bytes& plain,
                                        const SessionId& expect_sid) {
  ByteReader r(plain);
  if (r.u8() != kPayloadVersion)
    throw Error(ErrorCode::ShapeMismatch, "unsupported payload version");
  if (r.session_id() != expect_sid)
    throw Error(ErrorCode::ShapeMismatch, "payload bound to another session");
  ChallengeRecord challenge;
  challenge.range.begin = r.u32();
  challenge.range.end = r.u32();
  challenge.quantizer.n_states = r.u16();
  challenge.quantizer.boundaries = r.f64_vector();
  challenge.word.states = r.u16_vector();
  challenge.word.n_states = challenge.quantizer.n_states;
  challenge.quantizer.validate();
  if (challenge.word.states.size() != challenge.range.count())
    throw Error(ErrorCode::ShapeMismatch, "challenge word/range mismatch");
  for (std::uint16_t s : challenge.word.states)
    if (s >= challenge.word.n_states)
      throw Error(ErrorCode::ShapeMismatch, "challenge state out of range");
  return challenge;
}

Enrollment enroll(const PufArray& array, std::uint16_t n_states,
                  CellRange c1_range, CellRange c2_range,
                  const Environment& env, std::uint64_t seed,
                  CipherSuite& cipher, const EnrollOptions& options) {
  if (c1_range.overlaps(c2_range))
    throw Error(ErrorCode::ConfigError, "challenge ranges overlap");
  if (c1_range.count() < options.min_cells_per_range ||
      c2_range.count() < options.min_cells_per_range)
    throw Error(ErrorCode::ConfigError,
                "challenge range below minimum cell count");
  if (c1_range.end > array.cells.size() || c2_range.end > array.cells.size())
    throw Error(ErrorCode::ConfigError, "challenge range outside array");

  Enrollment enrollment;
  auto make_challenge = [&](CellRange range, std::uint64_t salt) {
    const auto sweep =
        measure_range(array, range, env, rng::derive(seed, rng::tag::kEnroll, salt));
    ChallengeRecord challenge;
    challenge.range = range;
    challenge.quantizer = calibrate_quantizer(sweep, n_states);
    challenge.word = encode(sweep, challenge.quantizer);
    return challenge;
  };
  enrollment.identity.c1 = make_challenge(c1_range, 1);
  enrollment.identity.c2 = make_challenge(c2_range, 2);

  const KeyPair keys =
      cipher.keypair_generate(rng::derive(seed, rng::tag::kDeviceKeys));
  enrollment.identity.public_key = keys.public_key;

  DeviceState& device = enrollment.device;
  device.array = array;
  device.env = env;
  device.keys = keys;
  device.c1_range = c1_range;
  device.c2_range = c2_range;
  device.c1_quantizer = enrollment.identity.c1.quantizer;
  device.c2_quantizer = enrollment.identity.c2.quantizer;
  PredictorOptions mle_options;
  mle_options.hinge_reference = array.drift.reference_temp_c;
  device.mle = PredictorModel(n_states, 2, mle_options);
  device.measure_seed = rng::derive(seed, rng::tag::kMeasure, 0xD);
  return enrollment;
}

ProtocolMessage server_initiate(ServerContext& server,
                                const std::string& device_id,
                                CipherSuite& cipher, AuthSession& session) {
  if (session.phase != Phase::Init)
    throw Error(ErrorCode::ProtocolOrder,
                "server_initiate requires a fresh session");
  auto it = server.identities.find(device_id);
  if (it == server.identities.end())
    throw Error(ErrorCode::NotFound, "device not enrolled: " + device_id);

  ProtocolMessage message;
  message.kind = MessageKind::AuthRequestC1;
  message.session_id = session.id;
  message.sender = Role::Server;
  message.payload = cipher.encrypt(
      it->second.public_key,
      serialize_challenge_payload(session.id, it->second.c1));
  session.transcript.push_back(message);
  return message;
}

DeviceVerdict device_verify_server(const ProtocolMessage& message,
                                   DeviceState& device, CipherSuite& cipher,
                                   AuthSession& session) {
  if (session.phase != Phase::Init)
    throw Error(ErrorCode::ProtocolOrder,
                "device_verify_server requires phase INIT");
  session.transcript.push_back(message);

  DeviceVerdict verdict;
  verdict.decision = failed_decision();
  auto refuse = [&](std::uint8_t code, const std::string& text) {
    fail_session(session);
    verdict.reply = make_error_message(session, Role::Device, cipher,
                                       device.server_public_key, code, text);
    return verdict;
  };

  if (message.kind != MessageKind::AuthRequestC1)
    return refuse(1, "expected AUTH_REQUEST_C1");
  if (message.session_id != session.id)
    return refuse(2, "session id mismatch");
  if (device.seen_sessions.seen(message.session_id))
    return refuse(3, "replayed session id");
  device.seen_sessions.remember(message.session_id);

  const auto plain = cipher.decrypt(device.keys.private_key, message.payload);
  if (!plain) return refuse(4, "decrypt failed");

  ChallengeRecord c1;
  try {
    c1 = parse_challenge_payload(*plain, session.id);
  } catch (const Error&) {
    return refuse(5, "malformed challenge payload");
  }
  if (c1.range.end > device.array.cells.size())
    return refuse(6, "challenge range outside array");

  const auto sweep = measure_range(
      device.array, c1.range, device.env,
      rng::derive(device.measure_seed, rng::tag::kMeasure,
                  device.measure_counter++));
  const StateWord r1 = encode(sweep, c1.quantizer);
  const ErrorVector ve = error_vector(c1.word, r1);
  const auto inputs = device.env.inputs();
  verdict.decision = device.mle.decide(ve, inputs, device.threshold);

  if (verdict.decision.accepted) {
    session.phase = Phase::ServerAuthed;
    if (device.learn)
      device.mle = device.mle.update({inputs, ve, device.mle_timestamp++});
  } else {
    fail_session(session);
  }

  ByteWriter w;
  w.u8(kPayloadVersion);
  w.session_id(session.id);
  w.u8(verdict.decision.accepted ? 1 : 0);
  w.f64(verdict.decision.distance);
  w.f64_vector(inputs);
  verdict.reply.kind = MessageKind::DeviceResult;
  verdict.reply.session_id = session.id;
  verdict.reply.sender = Role::Device;
  verdict.reply.payload = cipher.encrypt(device.server_public_key, w.take());
  session.transcript.push_back(verdict.reply);
  return verdict;
}

ProtocolMessage device_respond_r2(DeviceState& device, CipherSuite& cipher,
                                  AuthSession& session) {
  if (session.phase != Phase::ServerAuthed)
    throw Error(ErrorCode::ProtocolOrder,
                "device_respond_r2 requires phase SERVER_AUTHED");
  const auto sweep = measure_range(
      device.array, device.c2_range, device.env,
      rng::derive(device.measure_seed, rng::tag::kMeasure,
                  device.measure_counter++));
  const StateWord r2 = encode(sweep, device.c2_quantizer);

  ByteWriter w;
  w.u8(kPayloadVersion);
  w.session_id(session.id);
  w.u16_vector(r2.states);
  ProtocolMessage message;
  message.kind = MessageKind::ResponseR2;
  message.session_id = session.id;
  message.sender = Role::Device;
  message.payload = cipher.encrypt(device.server_public_key, w.take());
  session.transcript.push_back(message);
  return message;
}

ReportedResult server_record_device_result(const ProtocolMessage& message,
                                           ServerContext& server,
                                           CipherSuite& cipher,
                                           AuthSession& session) {
  if (session.phase == Phase::Init)
    throw Error(ErrorCode::ProtocolOrder,
                "device result before challenge was issued");
  session.transcript.push_back(message);
  if (message.kind != MessageKind::DeviceResult)
    throw Error(ErrorCode::ProtocolOrder, "expected DEVICE_RESULT");

  ReportedResult result;
  const auto plain = cipher.decrypt(server.keys.private_key, message.payload);
  if (!plain) {
    fail_session(session);
    return result;
  }
  try {
    ByteReader r(*plain);
    if (r.u8() != kPayloadVersion)
      throw Error(ErrorCode::ShapeMismatch, "unsupported payload version");
    if (r.session_id() != session.id)
      throw Error(ErrorCode::ShapeMismatch, "payload bound to another session");
    result.accepted = r.u8() != 0;
    result.distance = r.f64();
    result.inputs = r.f64_vector();
  } catch (const Error&) {
    fail_session(session);
    return result;
  }
  if (!result.accepted) {
    fail_session(session);
    return result;
  }
  session.reported_inputs = result.inputs;
  return result;
}

AuthDecision server_verify_device(const ProtocolMessage& message,
                                  ServerContext& server,
                                  const std::string& device_id,
                                  CipherSuite& cipher, AuthSession& session) {
  if (session.phase != Phase::ServerAuthed)
    throw Error(ErrorCode::ProtocolOrder,
                "server_verify_device requires phase SERVER_AUTHED");
  if (session.reported_inputs.empty())
    throw Error(ErrorCode::ProtocolOrder,
                "no reported inputs for this session");
  auto identity_it = server.identities.find(device_id);
  if (identity_it == server.identities.end())
    throw Error(ErrorCode::NotFound, "device not enrolled: " + device_id);
  session.transcript.push_back(message);

  AuthDecision decision = failed_decision();
  if (message.kind != MessageKind::ResponseR2 ||
      message.session_id != session.id) {
    fail_session(session);
    return decision;
  }
  const auto plain = cipher.decrypt(server.keys.private_key, message.payload);
  if (!plain) {
    fail_session(session);
    return decision;
  }

  StateWord r2;
  try {
    ByteReader r(*plain);
    if (r.u8() != kPayloadVersion)
      throw Error(ErrorCode::ShapeMismatch, "unsupported payload version");
    if (r.session_id() != session.id)
      throw Error(ErrorCode::ShapeMismatch, "payload bound to another session");
    r2.states = r.u16_vector();
    r2.n_states = identity_it->second.c2.quantizer.n_states;
    const ErrorVector ve = error_vector(identity_it->second.c2.word, r2);
    auto model_it = server.models.find(device_id);
    if (model_it == server.models.end())
      throw Error(ErrorCode::NotFound, "no model for device");
    const double threshold = server.thresholds.count(device_id)
                                 ? server.thresholds.at(device_id)
                                 : 0.0;
    decision =
        model_it->second.decide(ve, session.reported_inputs, threshold);
    if (decision.accepted && server.learn) {
      model_it->second = model_it->second.update(
          {session.reported_inputs, ve, server.mle_timestamp++});
    }
  } catch (const Error&) {
    fail_session(session);
    return failed_decision();
  }

  session.phase = decision.accepted ? Phase::MutualAuthed : Phase::Failed;
  return decision;
}

ProtocolMessage make_server_result(const AuthDecision& decision,
                                   const DeviceIdentity& identity,
                                   CipherSuite& cipher, AuthSession& session) {
  ByteWriter w;
  w.u8(kPayloadVersion);
  w.session_id(session.id);
  w.u8(decision.accepted ? 1 : 0);
  w.f64(decision.distance);
  ProtocolMessage message;
  message.kind = MessageKind::ServerResult;
  message.session_id = session.id;
  message.sender = Role::Server;
  message.payload = cipher.encrypt(identity.public_key, w.take());
  session.transcript.push_back(message);
  return message;
}

std::string identity_store_to_text(const ServerContext& server) {
  std::string out = "pufsim-identity-store-v1\n";
  for (const auto& [id, identity] : server.identities) {
    out += "[device " + id + "]\n";
    out += "public_key=" + hex_encode(identity.public_key) + "\n";
    write_challenge_fields(out, "c1", identity.c1);
    write_challenge_fields(out, "c2", identity.c2);
  }
  return out;
}

std::map<std::string, DeviceIdentity> identity_store_from_text(
    const std::string& text) try {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "pufsim-identity-store-v1")
    throw Error(ErrorCode::ConfigError, "unrecognized identity store version");

  std::map<std::string, DeviceIdentity> out;
  DeviceIdentity current;
  bool open = false;
  auto flush = [&]() {
    if (!open) return;
    current.c1.word.n_states = current.c1.quantizer.n_states;
    current.c2.word.n_states = current.c2.quantizer.n_states;
    out[current.device_id] = current;
    current = DeviceIdentity{};
  };
  auto parse_u16_list = [](const std::string& s) {
    std::vector<std::uint16_t> v;
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t next = s.find(',', pos);
      if (next == std::string::npos) next = s.size();
      v.push_back(static_cast<std::uint16_t>(
          std::stoul(s.substr(pos, next - pos))));
      pos = next + 1;
    }
    return v;
  };
  auto parse_f64_list = [](const std::string& s) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t next = s.find(',', pos);
      if (next == std::string::npos) next = s.size();
      v.push_back(std::strtod(s.substr(pos, next - pos).c_str(), nullptr));
      pos = next + 1;
    }
    return v;
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("[device ", 0) == 0 && line.back() == ']') {
      flush();
      current.device_id = line.substr(8, line.size() - 9);
      open = true;
      continue;
    }
    const auto eq = line.find('=');
    if (!open || eq == std::string::npos)
      throw Error(ErrorCode::ConfigError, "malformed identity store line");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    ChallengeRecord* challenge = nullptr;
    std::string sub = key;
    if (key.rfind("c1.", 0) == 0) {
      challenge = &current.c1;
      sub = key.substr(3);
    } else if (key.rfind("c2.", 0) == 0) {
      challenge = &current.c2;
      sub = key.substr(3);
    }
    if (key == "public_key") {
      current.public_key = hex_decode(value);
    } else if (challenge && sub == "range") {
      const auto colon = value.find(':');
      if (colon == std::string::npos)
        throw Error(ErrorCode::ConfigError, "malformed range");
      challenge->range.begin =
          static_cast<std::uint32_t>(std::stoul(value.substr(0, colon)));
      challenge->range.end =
          static_cast<std::uint32_t>(std::stoul(value.substr(colon + 1)));
    } else if (challenge && sub == "n_states") {
      challenge->quantizer.n_states =
          static_cast<std::uint16_t>(std::stoul(value));
    } else if (challenge && sub == "boundaries") {
      challenge->quantizer.boundaries = parse_f64_list(value);
    } else if (challenge && sub == "states") {
      challenge->word.states = parse_u16_list(value);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown identity store key: " + key);
    }
  }
  flush();
  return out;
} catch (const Error&) {
  throw;
} catch (const std::exception& e) {
  throw Error(ErrorCode::ConfigError,
              std::string("malformed identity store: ") + e.what());
}

}  // namespace pufsim
