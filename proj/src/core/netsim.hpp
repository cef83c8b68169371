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

#ifndef PUFSIM_CORE_NETSIM_HPP
#define PUFSIM_CORE_NETSIM_HPP

#include <optional>
#include <string>
#include <vector>

#include "core/calibration.hpp"
#include "core/puf_pki_protocol.hpp"

namespace pufsim {

/// What the adversary holds. Key material is per-device except for the
/// server pair; capabilities are immutable for the lifetime of a scenario.
/// Holding the server keys also grants read access to the enrollment
/// store's public fields (device ids and public keys) but not to the
/// challenge words, which have their own capabilities.
struct AdversaryCapability {
  bool has_server_keys = false;
  std::optional<std::string> has_device_keys;  // device id
  std::optional<std::string> has_c1;           // device id
  std::optional<std::string> has_c2;           // device id
  bool can_replay = false;
  bool can_tamper = false;

  bool empty() const {
    return !has_server_keys && !has_device_keys && !has_c1 && !has_c2 &&
           !can_replay && !can_tamper;
  }
};

struct EnvSchedule {
  enum class Kind { Constant, Sweep, List };
  Kind kind = Kind::Constant;
  double lo = 25.0;
  double hi = 25.0;
  std::vector<double> values;

  double at(std::uint32_t round, std::uint32_t total) const;
  double min_value() const;
  double max_value() const;
};

/// A participant endpoint: messages land in its inbox in delivery order and
/// are consumed front-first; the clock counts this node's deliveries.
struct NodeHandle {
  Role role = Role::Device;
  std::deque<ProtocolMessage> inbox;
  std::uint64_t clock = 0;
};

struct ScenarioConfig {
  std::uint32_t device_count = 1;
  std::uint32_t cells_per_device = 256;
  std::uint16_t n_states = 8;
  std::uint32_t rounds = 10;
  std::uint32_t warmup_rounds = 12;
  EnvSchedule temperature;
  EnvSchedule bias{EnvSchedule::Kind::Constant, 0.0, 0.0, {}};
  double device_temp_offset = 0.0;  // per-device additive stagger
  double drop_probability = 0.0;
  std::uint32_t retries = 0;
  PopulationParams population;  // cell_count overridden by cells_per_device
  DriftLaw drift;
  std::string cipher = "xor";
  AdversaryCapability adversary;
  std::uint32_t adversary_attempts = 0;
  std::uint32_t calibration_trials = 200;
  // Re-enroll a device (fresh challenges, fresh keypair) after this many
  // completed authentications; 0 disables refresh.
  std::uint32_t reenroll_after = 0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct RoundRecord {
  std::uint32_t round = 0;
  std::string device_id;
  Phase phase = Phase::Init;
  double distance = 0.0;
  bool accepted = false;
};

struct AttackRecord {
  std::uint32_t attempt = 0;
  std::string target;
  bool accepted = false;
  double distance = 0.0;
};

struct TickedMessage {
  std::uint64_t tick = 0;
  ProtocolMessage message;
};

struct DeviceTally {
  std::uint32_t completed = 0;
  std::uint32_t false_rejects = 0;  // genuine rounds ending FAILED
  std::uint32_t false_accepts = 0;  // adversary attempts that succeeded
};

struct ScenarioReport {
  std::vector<RoundRecord> rounds;
  std::vector<AttackRecord> attacks;
  std::map<std::string, DeviceTally> per_device;
  std::uint32_t completed_sessions = 0;
  std::uint32_t false_rejects = 0;
  std::uint32_t adversary_successes = 0;
  std::uint32_t dropped_messages = 0;
  std::vector<TickedMessage> transcript;

  std::string rounds_csv() const;
  std::string attacks_csv() const;
  Bytes transcript_bytes() const;  // tick-prefixed wire format
};

/// One server, N simulated devices, an optional adversary, and a logical-tick
/// message fabric with i.i.d. per-message loss. Fully deterministic under the
/// config seed (with the deterministic cipher suite).
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  /// Enrolls every device, runs the warm-up handshakes that populate both
  /// sides' drift histories, and calibrates per-device thresholds.
  void setup();

  /// Scored authentication rounds followed by the configured adversary
  /// attempts; returns the final report.
  ScenarioReport run();

  /// Plays one adversary session with the given capabilities against the
  /// target device and returns the defender's decision.
  AuthDecision inject_adversary_session(const AdversaryCapability& capability,
                                        const std::string& target_device,
                                        std::uint32_t attempt);

  const ServerContext& server() const { return server_; }
  const std::vector<DeviceState>& devices() const { return devices_; }

 private:
  DeviceState& device_by_id(const std::string& device_id);
  std::uint32_t device_index_of(const std::string& device_id) const;
  Environment env_for(std::uint32_t device_index, std::uint32_t round,
                      std::uint32_t total) const;
  bool transmit(const ProtocolMessage& message, NodeHandle& to, bool reliable);
  ProtocolMessage take(NodeHandle& from);
  void run_handshake(std::uint32_t device_index, const Environment& env,
                     std::uint64_t session_salt, bool reliable,
                     Phase& phase_out, double& distance_out);
  void reenroll(std::uint32_t device_index);
  SessionId make_session_id(std::uint64_t a, std::uint64_t b);
  AuthDecision attack_server_impersonation(const AdversaryCapability& capability,
                                           DeviceState& target,
                                           std::uint32_t attempt,
                                           double& distance_out);
  AuthDecision attack_device_impersonation(const AdversaryCapability& capability,
                                           const std::string& target_id,
                                           std::uint32_t attempt);

  ScenarioConfig config_;
  std::unique_ptr<CipherSuite> cipher_;
  ServerContext server_;
  std::vector<DeviceState> devices_;
  NodeHandle server_node_{Role::Server, {}, 0};
  std::vector<NodeHandle> device_nodes_;
  std::vector<std::uint32_t> auth_counts_;
  std::vector<std::uint32_t> reenroll_counts_;
  std::optional<PufArray> adversary_array_;
  std::uint64_t tick_ = 0;
  std::vector<TickedMessage> transcript_;
  std::uint32_t dropped_ = 0;
  bool ready_ = false;
};

ScenarioReport run_scenario(const ScenarioConfig& config);

}  // namespace pufsim

#endif
