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

#include "core/netsim.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "core/csv.hpp"
#include "core/rng.hpp"

namespace pufsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string device_name(std::uint32_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "device-%03u", index);
  return buf;
}
}  // namespace

double EnvSchedule::at(std::uint32_t round, std::uint32_t total) const {
  switch (kind) {
    case Kind::Constant:
      return lo;
    case Kind::Sweep:
      if (total <= 1) return lo;
      return lo + (hi - lo) * static_cast<double>(round) / (total - 1);
    case Kind::List:
      if (values.empty()) return lo;
      return values[round % values.size()];
  }
  return lo;
}

double EnvSchedule::min_value() const {
  switch (kind) {
    case Kind::Constant: return lo;
    case Kind::Sweep: return std::min(lo, hi);
    case Kind::List:
      return values.empty() ? lo
                            : *std::min_element(values.begin(), values.end());
  }
  return lo;
}

double EnvSchedule::max_value() const {
  switch (kind) {
    case Kind::Constant: return lo;
    case Kind::Sweep: return std::max(lo, hi);
    case Kind::List:
      return values.empty() ? lo
                            : *std::max_element(values.begin(), values.end());
  }
  return lo;
}

void ScenarioConfig::validate() const {
  if (device_count < 1)
    throw Error(ErrorCode::ConfigError, "device_count must be >= 1");
  if (cells_per_device < 128)
    throw Error(ErrorCode::ConfigError,
                "cells_per_device must be >= 128 (two 64-cell ranges)");
  if (n_states < 2)
    throw Error(ErrorCode::ConfigError, "n_states must be >= 2");
  if (drop_probability < 0.0 || drop_probability > 1.0)
    throw Error(ErrorCode::ConfigError, "drop_probability must be in [0, 1]");
  if (warmup_rounds < 3)
    throw Error(ErrorCode::ConfigError,
                "warmup_rounds must be >= 3 to train the predictors");
  if (calibration_trials < 2)
    throw Error(ErrorCode::ConfigError, "calibration_trials must be >= 2");
}

std::string ScenarioReport::rounds_csv() const {
  std::string out = "round,device_id,phase_reached,distance,accepted\n";
  for (const auto& r : rounds) {
    out += csv::number(static_cast<std::uint64_t>(r.round));
    out += ',';
    out += r.device_id;
    out += ',';
    out += phase_name(r.phase);
    out += ',';
    out += csv::number(r.distance);
    out += ',';
    out += r.accepted ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string ScenarioReport::attacks_csv() const {
  std::string out = "attempt,target_device,accepted,distance\n";
  for (const auto& a : attacks) {
    out += csv::number(static_cast<std::uint64_t>(a.attempt));
    out += ',';
    out += a.target;
    out += ',';
    out += a.accepted ? '1' : '0';
    out += ',';
    out += csv::number(a.distance);
    out += '\n';
  }
  return out;
}

Bytes ScenarioReport::transcript_bytes() const {
  Bytes out;
  for (const auto& ticked : transcript) {
    for (int shift = 56; shift >= 0; shift -= 8)
      out.push_back(static_cast<std::uint8_t>(ticked.tick >> shift));
    const Bytes wire = encode_message(ticked.message);
    out.insert(out.end(), wire.begin(), wire.end());
  }
  return out;
}

Simulation::Simulation(ScenarioConfig config) : config_(std::move(config)) {
  config_.validate();
  cipher_ = make_cipher(config_.cipher);
}

Environment Simulation::env_for(std::uint32_t device_index,
                                std::uint32_t round,
                                std::uint32_t total) const {
  Environment env;
  env.temperature_c = config_.temperature.at(round, total) +
                      config_.device_temp_offset * device_index;
  env.bias_offset_v = config_.bias.at(round, total);
  return env;
}

SessionId Simulation::make_session_id(std::uint64_t a, std::uint64_t b) {
  SessionId sid;
  rng::Stream stream(rng::derive(config_.seed, rng::tag::kSession, a, b));
  stream.fill(sid);
  return sid;
}

bool Simulation::transmit(const ProtocolMessage& message, NodeHandle& to,
                          bool reliable) {
  ++tick_;
  transcript_.push_back({tick_, message});
  if (!reliable && config_.drop_probability > 0.0) {
    bool delivered = false;
    for (std::uint32_t attempt = 0; attempt <= config_.retries; ++attempt) {
      rng::Stream roll(
          rng::derive(config_.seed, rng::tag::kDrop, tick_, attempt));
      if (roll.next_unit() > config_.drop_probability) {
        delivered = true;
        break;
      }
    }
    if (!delivered) {
      ++dropped_;
      return false;
    }
  }
  to.inbox.push_back(message);
  ++to.clock;
  return true;
}

ProtocolMessage Simulation::take(NodeHandle& from) {
  if (from.inbox.empty())
    throw Error(ErrorCode::Internal, "inbox empty");
  ProtocolMessage message = std::move(from.inbox.front());
  from.inbox.pop_front();
  return message;
}

DeviceState& Simulation::device_by_id(const std::string& device_id) {
  return devices_[device_index_of(device_id)];
}

std::uint32_t Simulation::device_index_of(const std::string& device_id) const {
  for (std::uint32_t i = 0; i < devices_.size(); ++i)
    if (devices_[i].device_id == device_id) return i;
  throw Error(ErrorCode::NotFound, "unknown device: " + device_id);
}

void Simulation::setup() {
  server_.keys =
      cipher_->keypair_generate(rng::derive(config_.seed, rng::tag::kServerKeys));

  PopulationParams params = config_.population;
  params.cell_count = config_.cells_per_device;
  const CellRange c1_range{0, config_.cells_per_device / 2};
  const CellRange c2_range{config_.cells_per_device / 2,
                           config_.cells_per_device};
  Environment enroll_env;
  enroll_env.temperature_c = config_.drift.reference_temp_c;

  device_nodes_.assign(config_.device_count, NodeHandle{Role::Device, {}, 0});
  auth_counts_.assign(config_.device_count, 0);
  reenroll_counts_.assign(config_.device_count, 0);

  for (std::uint32_t d = 0; d < config_.device_count; ++d) {
    const PufArray array = sample_array(
        params, config_.drift, rng::derive(config_.seed, rng::tag::kArray, d));
    Enrollment enrollment =
        enroll(array, config_.n_states, c1_range, c2_range, enroll_env,
               rng::derive(config_.seed, rng::tag::kEnroll, d), *cipher_);
    enrollment.identity.device_id = device_name(d);
    enrollment.device.device_id = device_name(d);
    enrollment.device.server_public_key = server_.keys.public_key;
    enrollment.device.threshold = kInf;
    server_.identities[enrollment.identity.device_id] = enrollment.identity;
    PredictorOptions mle_options;
    mle_options.hinge_reference = config_.drift.reference_temp_c;
    server_.models.emplace(enrollment.identity.device_id,
                           PredictorModel(config_.n_states, 2, mle_options));
    server_.thresholds[enrollment.identity.device_id] = kInf;
    devices_.push_back(std::move(enrollment.device));
  }

  // Warm-up: reliable delivery, accept-all thresholds; both sides accumulate
  // drift observations across the scenario's environment span.
  for (std::uint32_t w = 0; w < config_.warmup_rounds; ++w) {
    for (std::uint32_t d = 0; d < config_.device_count; ++d) {
      Phase phase = Phase::Init;
      double distance = kInf;
      run_handshake(d, env_for(d, w, config_.warmup_rounds),
                    rng::derive(1, w, d), true, phase, distance);
    }
  }

  EnvRange env_range;
  const double stagger =
      config_.device_temp_offset * (config_.device_count - 1);
  env_range.temp_lo = config_.temperature.min_value() + std::min(0.0, stagger);
  env_range.temp_hi = config_.temperature.max_value() + std::max(0.0, stagger);
  env_range.bias_lo = config_.bias.min_value();
  env_range.bias_hi = config_.bias.max_value();

  for (std::uint32_t d = 0; d < config_.device_count; ++d) {
    DeviceState& device = devices_[d];
    const DeviceIdentity& identity = server_.identities.at(device.device_id);
    const CalibrationResult device_side = calibrate_threshold(
        device.array, device.c1_range, identity.c1.quantizer,
        identity.c1.word, device.mle, env_range, config_.calibration_trials,
        rng::derive(config_.seed, rng::tag::kCalGenuine, d, 1));
    device.threshold = device_side.threshold;
    const CalibrationResult server_side = calibrate_threshold(
        device.array, device.c2_range, identity.c2.quantizer,
        identity.c2.word, server_.models.at(device.device_id), env_range,
        config_.calibration_trials,
        rng::derive(config_.seed, rng::tag::kCalGenuine, d, 2));
    server_.thresholds[device.device_id] = server_side.threshold;
  }
  ready_ = true;
}

void Simulation::run_handshake(std::uint32_t device_index,
                               const Environment& env,
                               std::uint64_t session_salt, bool reliable,
                               Phase& phase_out, double& distance_out) {
  DeviceState& device = devices_[device_index];
  NodeHandle& device_node = device_nodes_[device_index];
  device.env = env;

  AuthSession session;
  session.id = make_session_id(session_salt, device_index);
  phase_out = session.phase;
  distance_out = kInf;

  // Endpoints discard whatever a broken session left behind.
  auto drain = [&]() {
    device_node.inbox.clear();
    server_node_.inbox.clear();
    phase_out = session.phase;
  };

  const ProtocolMessage c1_message =
      server_initiate(server_, device.device_id, *cipher_, session);
  if (!transmit(c1_message, device_node, reliable)) return drain();

  const DeviceVerdict verdict =
      device_verify_server(take(device_node), device, *cipher_, session);
  distance_out = verdict.decision.distance;
  const bool result_delivered = transmit(verdict.reply, server_node_, reliable);

  bool r2_delivered = false;
  if (session.phase == Phase::ServerAuthed) {
    const ProtocolMessage r2_message =
        device_respond_r2(device, *cipher_, session);
    r2_delivered = transmit(r2_message, server_node_, reliable);
  }

  if (!result_delivered || session.phase != Phase::ServerAuthed)
    return drain();
  const ReportedResult reported = server_record_device_result(
      take(server_node_), server_, *cipher_, session);
  if (!reported.accepted || !r2_delivered) return drain();

  const AuthDecision server_decision = server_verify_device(
      take(server_node_), server_, device.device_id, *cipher_, session);
  distance_out = server_decision.distance;
  const ProtocolMessage result_message = make_server_result(
      server_decision, server_.identities.at(device.device_id), *cipher_,
      session);
  transmit(result_message, device_node, reliable);
  drain();
}

void Simulation::reenroll(std::uint32_t device_index) {
  DeviceState& device = devices_[device_index];
  Environment enroll_env;
  enroll_env.temperature_c = config_.drift.reference_temp_c;
  ++reenroll_counts_[device_index];
  Enrollment refreshed = enroll(
      device.array, config_.n_states, device.c1_range, device.c2_range,
      enroll_env,
      rng::derive(config_.seed, rng::tag::kEnroll, device_index,
                  reenroll_counts_[device_index]),
      *cipher_);
  refreshed.identity.device_id = device.device_id;
  server_.identities[device.device_id] = refreshed.identity;
  // Fresh challenges and keys; learned drift history and thresholds carry
  // over (same cells, same environment law).
  device.keys = refreshed.device.keys;
  device.c1_quantizer = refreshed.device.c1_quantizer;
  device.c2_quantizer = refreshed.device.c2_quantizer;
}

ScenarioReport Simulation::run() {
  if (!ready_) setup();
  ScenarioReport report;
  for (const auto& device : devices_) report.per_device[device.device_id] = {};

  for (std::uint32_t r = 0; r < config_.rounds; ++r) {
    for (std::uint32_t d = 0; d < config_.device_count; ++d) {
      Phase phase = Phase::Init;
      double distance = kInf;
      run_handshake(d, env_for(d, r, config_.rounds), rng::derive(2, r, d),
                    false, phase, distance);
      RoundRecord record{r, devices_[d].device_id, phase, distance,
                         phase == Phase::MutualAuthed};
      DeviceTally& tally = report.per_device[record.device_id];
      if (record.accepted) {
        ++report.completed_sessions;
        ++tally.completed;
        if (config_.reenroll_after > 0 &&
            ++auth_counts_[d] >= config_.reenroll_after) {
          auth_counts_[d] = 0;
          reenroll(d);
        }
      }
      if (phase == Phase::Failed) {
        ++report.false_rejects;
        ++tally.false_rejects;
      }
      report.rounds.push_back(std::move(record));
    }
  }

  for (std::uint32_t a = 0; a < config_.adversary_attempts; ++a) {
    const std::uint32_t target = a % config_.device_count;
    const std::string target_id = device_name(target);
    const AuthDecision decision =
        inject_adversary_session(config_.adversary, target_id, a);
    AttackRecord record{a, target_id, decision.accepted, decision.distance};
    if (record.accepted) {
      ++report.adversary_successes;
      ++report.per_device[target_id].false_accepts;
    }
    report.attacks.push_back(std::move(record));
  }

  report.dropped_messages = dropped_;
  report.transcript = transcript_;
  return report;
}

AuthDecision Simulation::attack_server_impersonation(
    const AdversaryCapability& capability, DeviceState& target,
    std::uint32_t attempt, double& distance_out) {
  NodeHandle& device_node = device_nodes_[device_index_of(target.device_id)];
  AuthSession session;
  session.id = make_session_id(rng::tag::kAdversary, attempt);
  rng::Stream stream(
      rng::derive(config_.seed, rng::tag::kAdversary, attempt, 7));

  ProtocolMessage message;
  message.sender = Role::Adversary;
  message.kind = MessageKind::AuthRequestC1;
  message.session_id = session.id;

  const bool knows_device_pk = capability.has_server_keys;
  if (capability.has_c1 == target.device_id && knows_device_pk) {
    // Full server-equivalence for this device: the stored challenge itself.
    const DeviceIdentity& identity = server_.identities.at(target.device_id);
    message.payload = cipher_->encrypt(
        identity.public_key,
        serialize_challenge_payload(session.id, identity.c1));
  } else if (capability.can_replay &&
             (attempt % 2 == 0 || !knows_device_pk)) {
    // Replay the latest recorded genuine challenge ciphertext verbatim.
    const ProtocolMessage* recorded = nullptr;
    for (const auto& ticked : transcript_) {
      if (ticked.message.kind == MessageKind::AuthRequestC1 &&
          ticked.message.sender == Role::Server)
        recorded = &ticked.message;
    }
    if (recorded) {
      message = *recorded;
      message.sender = Role::Adversary;
      session.id = message.session_id;
    } else if (!knows_device_pk) {
      stream.fill(message.session_id);
      message.payload.resize(64);
      stream.fill(message.payload);
      session.id = message.session_id;
    }
  } else if (knows_device_pk) {
    // Fabricated challenge: plausible quantizer from public technology
    // parameters, uniformly random states.
    PopulationParams guess = config_.population;
    guess.cell_count = target.c1_range.count();
    const PufArray sample = sample_array(
        guess, config_.drift,
        rng::derive(config_.seed, rng::tag::kAdversary, attempt, 11));
    ChallengeRecord fake;
    fake.range = target.c1_range;
    fake.quantizer = calibrate_quantizer(true_means(sample), config_.n_states);
    fake.word.n_states = config_.n_states;
    fake.word.states.resize(target.c1_range.count());
    for (auto& s : fake.word.states)
      s = static_cast<std::uint16_t>(stream.next_below(config_.n_states));
    const DeviceIdentity& identity = server_.identities.at(target.device_id);
    message.payload = cipher_->encrypt(
        identity.public_key, serialize_challenge_payload(session.id, fake));
  } else if (capability.can_tamper) {
    const ProtocolMessage* recorded = nullptr;
    for (const auto& ticked : transcript_) {
      if (ticked.message.kind == MessageKind::AuthRequestC1 &&
          ticked.message.sender == Role::Server)
        recorded = &ticked.message;
    }
    if (recorded) {
      message = *recorded;
      message.sender = Role::Adversary;
      session.id = message.session_id;
      if (!message.payload.empty())
        message.payload[message.payload.size() / 2] ^= 0x01;
    } else {
      message.payload.resize(64);
      stream.fill(message.payload);
    }
  } else {
    // No usable material: undecryptable noise.
    message.payload.resize(64);
    stream.fill(message.payload);
  }

  transmit(message, device_node, true);
  const DeviceVerdict verdict =
      device_verify_server(take(device_node), target, *cipher_, session);
  transmit(verdict.reply, server_node_, true);
  server_node_.inbox.clear();  // the reply is addressed to the real server
  distance_out = verdict.decision.distance;
  return verdict.decision;
}

AuthDecision Simulation::attack_device_impersonation(
    const AdversaryCapability& capability, const std::string& target_id,
    std::uint32_t attempt) {
  // The genuine server opens a session believing it reaches the device; the
  // adversary intercepts with the stolen device key material.
  NodeHandle adversary_node{Role::Adversary, {}, 0};
  AuthSession session;
  session.id = make_session_id(rng::tag::kAdversary + 1, attempt);
  const DeviceIdentity& identity = server_.identities.at(target_id);
  const DeviceState& real_device = device_by_id(target_id);

  const ProtocolMessage c1_message =
      server_initiate(server_, target_id, *cipher_, session);
  transmit(c1_message, adversary_node, true);

  const auto plain = cipher_->decrypt(real_device.keys.private_key,
                                      take(adversary_node).payload);
  AuthDecision refused;
  refused.accepted = false;
  refused.distance = kInf;
  if (!plain) {
    session.phase = Phase::Failed;
    return refused;
  }

  // The adversary claims step 1 succeeded and reports benign conditions.
  Environment claimed_env;
  claimed_env.temperature_c = config_.drift.reference_temp_c;
  const auto inputs = claimed_env.inputs();
  ByteWriter result;
  result.u8(1);
  result.session_id(session.id);
  result.u8(1);
  result.f64(0.0);
  result.f64_vector(inputs);
  ProtocolMessage result_message;
  result_message.kind = MessageKind::DeviceResult;
  result_message.session_id = session.id;
  result_message.sender = Role::Adversary;
  result_message.payload =
      cipher_->encrypt(server_.keys.public_key, result.take());
  session.phase = Phase::ServerAuthed;  // the server's view after the claim
  transmit(result_message, server_node_, true);
  server_record_device_result(take(server_node_), server_, *cipher_, session);

  StateWord r2;
  r2.n_states = config_.n_states;
  if (capability.has_c2 == target_id) {
    r2 = identity.c2.word;
  } else {
    if (!adversary_array_) {
      PopulationParams params = config_.population;
      params.cell_count = config_.cells_per_device;
      adversary_array_ = sample_array(
          params, config_.drift,
          rng::derive(config_.seed, rng::tag::kAdversary, 0xA));
    }
    const auto sweep = measure_range(
        *adversary_array_, real_device.c2_range, claimed_env,
        rng::derive(config_.seed, rng::tag::kAdversary, attempt, 21));
    r2 = encode(sweep, calibrate_quantizer(sweep, config_.n_states));
  }

  ByteWriter w;
  w.u8(1);
  w.session_id(session.id);
  w.u16_vector(r2.states);
  ProtocolMessage r2_message;
  r2_message.kind = MessageKind::ResponseR2;
  r2_message.session_id = session.id;
  r2_message.sender = Role::Adversary;
  r2_message.payload = cipher_->encrypt(server_.keys.public_key, w.take());
  transmit(r2_message, server_node_, true);

  return server_verify_device(take(server_node_), server_, target_id,
                              *cipher_, session);
}

AuthDecision Simulation::inject_adversary_session(
    const AdversaryCapability& capability, const std::string& target_device,
    std::uint32_t attempt) {
  if (!ready_) setup();
  if (capability.has_device_keys == target_device)
    return attack_device_impersonation(capability, target_device, attempt);
  DeviceState& target = device_by_id(target_device);
  double distance = kInf;
  return attack_server_impersonation(capability, target, attempt, distance);
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  Simulation sim(config);
  sim.setup();
  return sim.run();
}

}  // namespace pufsim
