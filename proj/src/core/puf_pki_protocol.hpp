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

#ifndef PUFSIM_CORE_PUF_PKI_PROTOCOL_HPP
#define PUFSIM_CORE_PUF_PKI_PROTOCOL_HPP

#include <deque>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "core/cipher.hpp"
#include "core/drift_mle.hpp"
#include "core/multistate_codec.hpp"
#include "core/reram_model.hpp"
#include "core/wire.hpp"

namespace pufsim {

/// A stored challenge: which cells it covers, the quantizer calibrated on
/// them at enrollment, and the enrolled state word.
struct ChallengeRecord {
  CellRange range;
  StateQuantizer quantizer;
  StateWord word;
};

/// Server-side enrollment record for one device. The two challenges come
/// from disjoint parts of the device's array.
struct DeviceIdentity {
  std::string device_id;
  Bytes public_key;
  ChallengeRecord c1;
  ChallengeRecord c2;
};

enum class Phase : std::uint8_t {
  Init = 0,
  ServerAuthed = 1,
  MutualAuthed = 2,
  Failed = 3,
};

const char* phase_name(Phase phase);

/// Handshake state. Legal transitions: Init -> ServerAuthed -> MutualAuthed,
/// and any pre-terminal phase -> Failed. Nothing leaves Failed.
struct AuthSession {
  SessionId id{};
  Phase phase = Phase::Init;
  std::vector<ProtocolMessage> transcript;
  std::vector<double> reported_inputs;  // from the step-1 device result
};

/// Bounded remember-set of session ids the device has already served;
/// replayed challenge ciphertexts land here and are refused.
class ReplayWindow {
 public:
  explicit ReplayWindow(std::size_t capacity = 4096) : capacity_(capacity) {}

  bool seen(const SessionId& sid) const;
  void remember(const SessionId& sid);

 private:
  std::size_t capacity_;
  std::unordered_set<std::string> set_;
  std::deque<std::string> order_;
};

/// Everything the device side holds after enrollment: its physical array,
/// keys, the geometry and quantizers of its two challenge regions (not the
/// challenge words themselves; C1 arrives from the server), and its local
/// drift predictor.
struct DeviceState {
  std::string device_id;
  PufArray array;
  Environment env;
  KeyPair keys;
  Bytes server_public_key;
  CellRange c1_range;
  CellRange c2_range;
  StateQuantizer c1_quantizer;
  StateQuantizer c2_quantizer;
  PredictorModel mle{8, 2};
  double threshold = 0.0;
  bool learn = true;
  std::uint64_t measure_seed = 0;
  std::uint64_t measure_counter = 0;
  std::uint64_t mle_timestamp = 0;
  ReplayWindow seen_sessions;
};

/// Server side: its keypair, the identity store, and one drift predictor and
/// threshold per enrolled device.
struct ServerContext {
  KeyPair keys;
  std::map<std::string, DeviceIdentity> identities;
  std::map<std::string, PredictorModel> models;
  std::map<std::string, double> thresholds;
  bool learn = true;
  std::uint64_t mle_timestamp = 0;
};

struct EnrollOptions {
  std::uint32_t min_cells_per_range = 64;
};

struct Enrollment {
  DeviceIdentity identity;
  DeviceState device;
};

/// Measures both ranges at the enrollment environment, calibrates one
/// quantizer per range, encodes C1/C2 and generates the device keypair.
/// Deterministic under the seed.
Enrollment enroll(const PufArray& array, std::uint16_t n_states,
                  CellRange c1_range, CellRange c2_range,
                  const Environment& env, std::uint64_t seed,
                  CipherSuite& cipher, const EnrollOptions& options = {});

/// Step 1 (server -> device): C1 encrypted to the device's public key.
ProtocolMessage server_initiate(ServerContext& server,
                                const std::string& device_id,
                                CipherSuite& cipher, AuthSession& session);

struct DeviceVerdict {
  AuthDecision decision;
  ProtocolMessage reply;
};

/// Step 1 (device side): decrypt C1, measure its range, compare error
/// vectors through the local predictor. Accepting authenticates the server
/// and moves the session to ServerAuthed; anything else fails the session.
DeviceVerdict device_verify_server(const ProtocolMessage& message,
                                   DeviceState& device, CipherSuite& cipher,
                                   AuthSession& session);

/// Step 2 (device -> server): fresh response over the C2 range, encrypted to
/// the server. Only legal from ServerAuthed.
ProtocolMessage device_respond_r2(DeviceState& device, CipherSuite& cipher,
                                  AuthSession& session);

struct ReportedResult {
  bool accepted = false;
  double distance = 0.0;
  std::vector<double> inputs;
};

/// Server-side intake of the step-1 result; records the device's reported
/// environment inputs on the session for the step-2 prediction.
ReportedResult server_record_device_result(const ProtocolMessage& message,
                                           ServerContext& server,
                                           CipherSuite& cipher,
                                           AuthSession& session);

/// Step 2 (server side): compare C2 against R2 under the reported inputs.
/// Accepting completes mutual authentication and appends the observation to
/// the server's history for that device.
AuthDecision server_verify_device(const ProtocolMessage& message,
                                  ServerContext& server,
                                  const std::string& device_id,
                                  CipherSuite& cipher, AuthSession& session);

ProtocolMessage make_server_result(const AuthDecision& decision,
                                   const DeviceIdentity& identity,
                                   CipherSuite& cipher, AuthSession& session);

// Identity store persistence: one structured text record per device
// (device id, public key in base-16, challenge state lists, quantizer
// boundaries).
std::string identity_store_to_text(const ServerContext& server);
std::map<std::string, DeviceIdentity> identity_store_from_text(
    const std::string& text);

// Payload plaintext helpers shared with the network simulator.
Bytes serialize_challenge_payload(const SessionId& sid,
                                  const ChallengeRecord& challenge);
ChallengeRecord parse_challenge_payload(const Bytes& plain,
                                        const SessionId& expect_sid);

}  // namespace pufsim

#endif
