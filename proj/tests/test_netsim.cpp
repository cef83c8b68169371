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
#include "doctest.h"

using namespace pufsim;

namespace {

ScenarioConfig benign_config(std::uint64_t seed = 11, std::uint32_t rounds = 10,
                             std::uint32_t devices = 1) {
  ScenarioConfig config;
  config.seed = seed;
  config.rounds = rounds;
  config.device_count = devices;
  config.cells_per_device = 256;
  config.warmup_rounds = 12;
  config.calibration_trials = 100;
  config.temperature.kind = EnvSchedule::Kind::Sweep;
  config.temperature.lo = -25.0;
  config.temperature.hi = 85.0;
  config.population.cell_count = 256;
  return config;
}

}  // namespace

TEST_CASE("benign scenario completes every round") {
  const ScenarioReport report = run_scenario(benign_config());
  REQUIRE(report.rounds.size() == 10);
  CHECK(report.completed_sessions == 10);
  CHECK(report.false_rejects == 0);
  for (const auto& record : report.rounds) {
    CHECK(record.phase == Phase::MutualAuthed);
    CHECK(record.accepted);
  }
  const DeviceTally& tally = report.per_device.at("device-000");
  CHECK(tally.completed == 10);
  CHECK(tally.false_rejects == 0);
  CHECK(tally.false_accepts == 0);
}

TEST_CASE("challenge refresh replaces the stored challenges mid-run") {
  ScenarioConfig config = benign_config(119, 9);
  config.reenroll_after = 3;
  Simulation sim(config);
  sim.setup();
  const std::vector<std::uint16_t> original_c1 =
      sim.server().identities.at("device-000").c1.word.states;
  const ScenarioReport report = sim.run();
  CHECK(report.completed_sessions == 9);  // refresh does not break rounds
  CHECK(sim.server().identities.at("device-000").c1.word.states !=
        original_c1);
}

TEST_CASE("identical configs produce byte-identical reports and transcripts") {
  const ScenarioConfig config = benign_config(77, 5, 2);
  const ScenarioReport a = run_scenario(config);
  const ScenarioReport b = run_scenario(config);
  CHECK(a.rounds_csv() == b.rounds_csv());
  CHECK(a.transcript_bytes() == b.transcript_bytes());

  ScenarioConfig reseeded = config;
  reseeded.seed = 78;
  const ScenarioReport c = run_scenario(reseeded);
  CHECK(a.transcript_bytes() != c.transcript_bytes());
}

TEST_CASE("total message loss completes nothing and accepts nothing") {
  ScenarioConfig config = benign_config(5, 8);
  config.drop_probability = 1.0;
  const ScenarioReport report = run_scenario(config);
  CHECK(report.completed_sessions == 0);
  CHECK(report.adversary_successes == 0);
  for (const auto& record : report.rounds) CHECK(record.phase == Phase::Init);
}

TEST_CASE("retries recover the expected completion fraction under loss") {
  ScenarioConfig config = benign_config(21, 150);
  config.drop_probability = 0.3;
  config.retries = 2;
  const ScenarioReport report = run_scenario(config);
  // four wire messages per session: completion must beat the no-retry bound
  const double bound = 0.7 * 0.7 * 0.7 * 0.7;
  const double fraction =
      static_cast<double>(report.completed_sessions) / report.rounds.size();
  CHECK(fraction >= bound);
  CHECK(report.dropped_messages > 0);
}

TEST_CASE("ticks in the transcript are strictly increasing") {
  const ScenarioReport report = run_scenario(benign_config(31, 3, 2));
  REQUIRE(!report.transcript.empty());
  for (std::size_t i = 1; i < report.transcript.size(); ++i)
    CHECK(report.transcript[i].tick > report.transcript[i - 1].tick);
}

TEST_CASE("unprivileged adversaries are rejected every time") {
  ScenarioConfig config = benign_config(41, 2);
  config.adversary_attempts = 50;  // empty capability set
  const ScenarioReport report = run_scenario(config);
  CHECK(report.attacks.size() == 50);
  CHECK(report.adversary_successes == 0);
}

TEST_CASE("stolen server keys alone fail the impostor Monte-Carlo") {
  ScenarioConfig config = benign_config(51, 3);
  config.adversary.has_server_keys = true;
  config.adversary.can_replay = true;
  config.adversary_attempts = 300;
  const ScenarioReport report = run_scenario(config);
  CHECK(report.attacks.size() == 300);
  // <= 1% success
  CHECK(report.adversary_successes <= 3);
}

TEST_CASE("stolen keys plus the stored challenge succeed only on the target") {
  ScenarioConfig config = benign_config(61, 3, 3);
  config.adversary.has_server_keys = true;
  config.adversary.has_c1 = "device-000";
  config.adversary_attempts = 30;  // rotates across all three devices
  const ScenarioReport report = run_scenario(config);
  std::uint32_t target_hits = 0, other_hits = 0;
  for (const auto& attack : report.attacks) {
    if (attack.target == "device-000" && attack.accepted) ++target_hits;
    if (attack.target != "device-000" && attack.accepted) ++other_hits;
  }
  CHECK(target_hits == 10);  // every attempt against the compromised device
  CHECK(other_hits == 0);
}

TEST_CASE("device-key compromise without the array is rejected server-side") {
  ScenarioConfig config = benign_config(71, 3);
  config.adversary.has_device_keys = "device-000";
  config.adversary_attempts = 200;
  const ScenarioReport report = run_scenario(config);
  CHECK(report.adversary_successes <= 2);  // <= 1%
}

TEST_CASE("device keys plus the second challenge impersonate the device") {
  ScenarioConfig config = benign_config(81, 3);
  config.adversary.has_device_keys = "device-000";
  config.adversary.has_c2 = "device-000";
  config.adversary_attempts = 10;
  const ScenarioReport report = run_scenario(config);
  CHECK(report.adversary_successes == 10);
}

TEST_CASE("compromising one device changes no other device's outcomes") {
  const ScenarioConfig baseline = benign_config(91, 6, 3);
  ScenarioConfig compromised = baseline;
  compromised.adversary.has_device_keys = "device-000";
  compromised.adversary.has_c1 = "device-000";
  compromised.adversary.has_c2 = "device-000";
  compromised.adversary_attempts = 12;

  const ScenarioReport a = run_scenario(baseline);
  const ScenarioReport b = run_scenario(compromised);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    if (a.rounds[i].device_id == "device-000") continue;
    CHECK(a.rounds[i].device_id == b.rounds[i].device_id);
    CHECK(a.rounds[i].phase == b.rounds[i].phase);
    CHECK(a.rounds[i].distance == b.rounds[i].distance);
    CHECK(a.rounds[i].accepted == b.rounds[i].accepted);
  }
}

TEST_CASE("injected sessions report the defender's decision") {
  Simulation sim(benign_config(101, 2, 2));
  sim.setup();

  AdversaryCapability with_challenge;
  with_challenge.has_server_keys = true;
  with_challenge.has_c1 = "device-001";
  CHECK(sim.inject_adversary_session(with_challenge, "device-001", 0).accepted);

  AdversaryCapability keys_only;
  keys_only.has_server_keys = true;
  CHECK_FALSE(
      sim.inject_adversary_session(keys_only, "device-001", 1).accepted);

  AdversaryCapability nothing;
  CHECK_FALSE(sim.inject_adversary_session(nothing, "device-001", 2).accepted);
}

TEST_CASE("scenario config validation rejects bad values") {
  ScenarioConfig config = benign_config();
  config.device_count = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = benign_config();
  config.cells_per_device = 64;
  CHECK_THROWS_AS(config.validate(), Error);
  config = benign_config();
  config.drop_probability = 1.5;
  CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("schedules cover constant, sweep, and list forms") {
  EnvSchedule constant;
  CHECK(constant.at(3, 10) == 25.0);
  EnvSchedule sweep{EnvSchedule::Kind::Sweep, -25.0, 85.0, {}};
  CHECK(sweep.at(0, 12) == doctest::Approx(-25.0));
  CHECK(sweep.at(11, 12) == doctest::Approx(85.0));
  CHECK(sweep.min_value() == -25.0);
  CHECK(sweep.max_value() == 85.0);
  EnvSchedule list{EnvSchedule::Kind::List, 0, 0, {10.0, 20.0, 30.0}};
  CHECK(list.at(4, 6) == 20.0);
  CHECK(list.max_value() == 30.0);
}
