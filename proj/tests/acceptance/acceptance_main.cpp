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

// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the exit
// code is the number of failed criteria. Run with no arguments for all
// criteria or with a single number to run one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core/calibration.hpp"
#include "core/experiment.hpp"
#include "core/rng.hpp"

using namespace pufsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---- criterion 1: exact equivalence against a brute-force oracle ---------

ErrorVector brute_force_ve(const StateWord& challenge,
                           const StateWord& response) {
  ErrorVector ve;
  ve.errors.resize(challenge.n_states, 0.0);
  ve.occupancies.resize(challenge.n_states, 0);
  for (std::uint16_t state = 0; state < challenge.n_states; ++state) {
    std::uint64_t sum = 0;
    std::uint32_t count = 0;
    for (std::size_t k = 0; k < challenge.states.size(); ++k) {
      if (challenge.states[k] != state) continue;
      const int diff = static_cast<int>(response.states[k]) -
                       static_cast<int>(challenge.states[k]);
      sum += static_cast<std::uint64_t>(diff < 0 ? -diff : diff);
      ++count;
    }
    ve.occupancies[state] = count;
    if (count) ve.errors[state] = static_cast<double>(sum) / count;
  }
  return ve;
}

Outcome criterion1() {
  const auto start = Clock::now();
  rng::Stream stream(rng::derive(0xC1));
  const std::uint16_t state_choices[3] = {2, 4, 8};
  for (int pair = 0; pair < 100000; ++pair) {
    const std::uint16_t n_states = state_choices[pair % 3];
    const std::size_t length = 1 + stream.next_below(512);
    StateWord challenge, response;
    challenge.n_states = response.n_states = n_states;
    challenge.states.resize(length);
    response.states.resize(length);
    for (std::size_t k = 0; k < length; ++k) {
      challenge.states[k] =
          static_cast<std::uint16_t>(stream.next_below(n_states));
      response.states[k] =
          static_cast<std::uint16_t>(stream.next_below(n_states));
    }
    const ErrorVector got = error_vector(challenge, response);
    const ErrorVector want = brute_force_ve(challenge, response);
    if (got.errors != want.errors || got.occupancies != want.occupancies)
      return {false, "mismatch against oracle at pair " + std::to_string(pair)};
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return {false, "runtime " + fmt(elapsed) + "s >= 10s"};
  return {true, "10^5 pairs exact, " + fmt(elapsed) + "s"};
}

// ---- criterion 2: distribution reproduction ------------------------------

double summary_field(const std::string& csv, const char* key) {
  const auto pos = csv.rfind(std::string("# mean="));
  if (pos == std::string::npos) return NAN;
  const std::string tail = csv.substr(pos);
  const auto at = tail.find(std::string(key) + "=");
  if (at == std::string::npos) return NAN;
  return std::strtod(tail.c_str() + at + std::strlen(key) + 1, nullptr);
}

Outcome criterion2() {
  const auto start = Clock::now();
  const KvConfig config = KvConfig::parse_text("seed=20260810\n");
  const CmdOutput output = cmd_distribution(config);
  const std::string& csv = output.file("distribution.csv");
  const double mean = summary_field(csv, "mean");
  const double sd = summary_field(csv, "sd");
  const double elapsed = seconds_since(start);
  const bool ok = std::abs(mean - 2.1) <= 0.02 && std::abs(sd - 0.54) <= 0.02 &&
                  elapsed < 5.0;
  return {ok, "mean " + fmt(mean) + " (want 2.1 +/- 0.02), sd " + fmt(sd) +
                  " (want 0.54 +/- 0.02), " + fmt(elapsed) + "s"};
}

// ---- criterion 3: drift asymmetry directional check -----------------------

std::map<std::string, std::vector<double>> drift_table(const std::string& csv) {
  std::map<std::string, std::vector<double>> table;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(',', pos);
      if (next == std::string::npos) next = line.size();
      fields.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
    auto& row = table[fields[0]];
    if (row.empty()) row.resize(8, 0.0);
    row[std::strtoul(fields[1].c_str(), nullptr, 10)] =
        std::strtod(fields[2].c_str(), nullptr);
  }
  return table;
}

Outcome criterion3() {
  const auto start = Clock::now();
  // Zero intra-cell noise scan, as stated; the base-noise reference row is
  // taken from the same scan at the default cell sigma (the most favorable
  // reading of "its base-noise value").
  const KvConfig zero_noise = KvConfig::parse_text(
      "seed=303\ndriftscan.noise_sigma=0\n");
  const auto scan = drift_table(cmd_drift_analysis(zero_noise).file("drift.csv"));
  const KvConfig with_noise = KvConfig::parse_text("seed=303\n");
  const auto noisy = drift_table(cmd_drift_analysis(with_noise).file("drift.csv"));
  const std::vector<double>& base = noisy.at("2.1");

  std::string failures;
  auto expect = [&](const char* level, int state, bool want_le) {
    const double drifted = scan.at(level)[state];
    const double reference = base[state];
    const bool ok = want_le ? drifted <= reference : drifted >= reference;
    if (!ok) {
      failures += std::string(" E") + std::to_string(state) + "(" + level +
                  ")=" + fmt(drifted) + (want_le ? ">" : "<") +
                  fmt(reference);
    }
  };
  for (const char* level : {"2.25", "2.4"}) {
    for (int i = 0; i < 4; ++i) expect(level, i, true);
    for (int i = 4; i < 8; ++i) expect(level, i, false);
  }
  for (const char* level : {"1.95", "1.8"}) {
    for (int i = 0; i < 4; ++i) expect(level, i, false);
    for (int i = 4; i < 8; ++i) expect(level, i, true);
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return {false, "runtime " + fmt(elapsed) + "s >= 10s"};
  if (!failures.empty())
    return {false, "directional check violated:" + failures};
  return {true, "all 32 directional checks hold, " + fmt(elapsed) + "s"};
}

// ---- criterion 4: sigma-ratio monotonicity --------------------------------

Outcome criterion4() {
  const auto start = Clock::now();
  const KvConfig config = KvConfig::parse_text("seed=404\n");
  const std::string& csv = cmd_sigma_ratio(config).file("sigma_ratio.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double previous = 1e18;
  int rows = 0;
  std::string detail = "mean errors:";
  while (std::getline(in, line)) {
    const auto last_comma = line.find_last_of(',');
    const double error = std::strtod(line.c_str() + last_comma + 1, nullptr);
    detail += " " + fmt(error);
    if (error > previous) {
      return {false, "mean error increased with the ratio —" + detail};
    }
    previous = error;
    ++rows;
  }
  const double elapsed = seconds_since(start);
  if (rows != 6) return {false, "expected a 6-point grid, got " + std::to_string(rows)};
  if (elapsed >= 30.0) return {false, "runtime " + fmt(elapsed) + "s >= 30s"};
  return {true, detail + ", " + fmt(elapsed) + "s"};
}

// ---- criterion 5: ternary margin sweep ------------------------------------

Outcome criterion5() {
  const auto start = Clock::now();
  const double margins[4] = {0.0, 0.1, 0.2, 0.3};
  double sums[4] = {0, 0, 0, 0};
  const int trials = 1000;
  const std::size_t cells = 128;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> enrolled(cells), fresh(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      rng::Stream stream(rng::derive(0xC5, t, i));
      enrolled[i] = stream.next_normal(2.1, 0.54);
      fresh[i] = enrolled[i] + stream.next_normal(0.0, 0.08);
    }
    std::vector<double> sorted(enrolled);
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[cells / 2 - 1] + sorted[cells / 2]);
    // margin blanks unreliable cells at enrollment; responses read binary
    const TernaryWord response = ternary_encode(fresh, median, 0.0);
    for (int m = 0; m < 4; ++m)
      sums[m] += ternary_crp_error(
          ternary_encode(enrolled, median, margins[m]), response);
  }
  std::string detail = "mean error by margin:";
  bool ok = true;
  for (int m = 0; m < 4; ++m) {
    detail += " " + fmt(sums[m] / trials);
    if (m > 0 && sums[m] > sums[m - 1]) ok = false;
  }
  return {ok, detail + ", " + fmt(seconds_since(start)) + "s"};
}

// ---- criterion 6: predictor exactness and separation ----------------------

Outcome criterion6() {
  const auto start = Clock::now();

  // exact affine recovery
  std::vector<ObservationRecord> history;
  std::uint64_t ts = 0;
  for (double dt : {-30.0, 0.0, 30.0, 60.0}) {
    ErrorVector ve;
    ve.errors.assign(8, 0.1 + 0.002 * dt);
    ve.occupancies.assign(8, 16);
    history.push_back({{25.0 + dt, 0.0}, std::move(ve), ts++});
  }
  const PredictorModel affine = PredictorModel::fit(8, 2, std::move(history));
  for (std::uint16_t state = 0; state < 8; ++state) {
    const double slope = affine.coefficients(state)[1];
    if (std::abs(slope - 0.002) > 1e-6)
      return {false, "slope " + fmt(slope) + " off by more than 1e-6"};
  }

  // genuine/impostor separation on 128-cell words, 8 states
  PopulationParams params;
  params.cell_count = 128;
  params.sigma_cell_law = SigmaCellLaw::constant(0.05);
  const PufArray array = sample_array(params, DriftLaw{}, 0xC6);
  const CellRange range{0, 128};
  const auto mu = true_means(array);
  const StateQuantizer quantizer = calibrate_quantizer(mu, 8);
  const StateWord challenge = encode(mu, quantizer);
  EnvRange env_range;
  env_range.temp_lo = -25.0;
  env_range.temp_hi = 85.0;
  const PredictorModel model = train_on_env_grid(array, range, quantizer,
                                                 challenge, env_range, 24, 601);
  const CalibrationResult calibration = calibrate_threshold(
      array, range, quantizer, challenge, model, env_range, 500, 602);

  int false_rejects = 0, false_accepts = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    rng::Stream pick(rng::derive(0xC6F, t));
    Environment env;
    env.temperature_c = pick.next_uniform(-25.0, 85.0);
    const auto sweep =
        measure_range(array, range, env, rng::derive(0xC61, t));
    const ErrorVector ve = error_vector(challenge, encode(sweep, quantizer));
    if (!model.decide(ve, env.inputs(), calibration.threshold).accepted)
      ++false_rejects;
  }
  for (int t = 0; t < trials; ++t) {
    rng::Stream pick(rng::derive(0xC6E, t));
    Environment env;
    env.temperature_c = pick.next_uniform(-25.0, 85.0);
    const PufArray impostor =
        sample_array(params, DriftLaw{}, rng::derive(0xC62, t));
    const auto sweep =
        measure_range(impostor, range, env, rng::derive(0xC63, t));
    const ErrorVector ve = error_vector(challenge, encode(sweep, quantizer));
    if (model.decide(ve, env.inputs(), calibration.threshold).accepted)
      ++false_accepts;
  }
  const bool ok = false_rejects <= 10 && false_accepts <= 10;
  return {ok, "threshold " + fmt(calibration.threshold) + ", FRR " +
                  std::to_string(false_rejects) + "/1000, FAR " +
                  std::to_string(false_accepts) + "/1000, " +
                  fmt(seconds_since(start)) + "s"};
}

// ---- criterion 7: protocol completeness and containment -------------------

ScenarioConfig protocol_base(std::uint64_t seed, std::uint32_t rounds,
                             std::uint32_t devices) {
  ScenarioConfig config;
  config.seed = seed;
  config.rounds = rounds;
  config.device_count = devices;
  config.cells_per_device = 256;
  config.warmup_rounds = 12;
  config.calibration_trials = 200;
  config.temperature.kind = EnvSchedule::Kind::Sweep;
  config.temperature.lo = -25.0;
  config.temperature.hi = 85.0;
  config.population.cell_count = 256;
  return config;
}

Outcome criterion7() {
  const auto start = Clock::now();

  // benign completeness across the temperature range
  const ScenarioReport benign = run_scenario(protocol_base(0xC701, 100, 1));
  if (benign.completed_sessions != 100)
    return {false, "benign: " + std::to_string(benign.completed_sessions) +
                       "/100 completed"};

  // stolen server keys: 1000 impersonation attempts
  ScenarioConfig stolen = protocol_base(0xC702, 3, 1);
  stolen.adversary.has_server_keys = true;
  stolen.adversary.can_replay = true;
  stolen.adversary_attempts = 1000;
  const ScenarioReport stolen_report = run_scenario(stolen);
  if (stolen_report.adversary_successes > 10)
    return {false, "stolen-server-keys: " +
                       std::to_string(stolen_report.adversary_successes) +
                       "/1000 succeeded"};

  // stolen keys plus the stored challenge: exact containment
  const ScenarioConfig baseline = protocol_base(0xC703, 10, 3);
  ScenarioConfig compromised = baseline;
  compromised.adversary.has_server_keys = true;
  compromised.adversary.has_c1 = "device-000";
  compromised.adversary_attempts = 300;
  const ScenarioReport before = run_scenario(baseline);
  const ScenarioReport after = run_scenario(compromised);

  std::uint32_t target_hits = 0, target_attempts = 0, other_hits = 0;
  for (const auto& attack : after.attacks) {
    if (attack.target == "device-000") {
      ++target_attempts;
      if (attack.accepted) ++target_hits;
    } else if (attack.accepted) {
      ++other_hits;
    }
  }
  if (target_hits != target_attempts)
    return {false, "target device resisted its own challenge: " +
                       std::to_string(target_hits) + "/" +
                       std::to_string(target_attempts)};
  if (other_hits != 0)
    return {false, std::to_string(other_hits) +
                       " non-target acceptances under stolen C1"};

  if (before.rounds.size() != after.rounds.size())
    return {false, "containment diff: round counts differ"};
  for (std::size_t i = 0; i < before.rounds.size(); ++i) {
    const RoundRecord& a = before.rounds[i];
    const RoundRecord& b = after.rounds[i];
    if (a.device_id == "device-000") continue;
    if (a.device_id != b.device_id || a.phase != b.phase ||
        a.distance != b.distance || a.accepted != b.accepted)
      return {false, "containment diff: outcome changed for " + a.device_id};
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) return {false, "runtime " + fmt(elapsed) + "s >= 60s"};
  return {true, "benign 100/100, stolen-keys " +
                    std::to_string(stolen_report.adversary_successes) +
                    "/1000, containment exact, " + fmt(elapsed) + "s"};
}

// ---- criterion 8: byte-identical reruns ------------------------------------

Outcome criterion8() {
  const auto start = Clock::now();
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pufsim_acceptance_c8";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::string protocol_cfg =
      "seed=808\n"
      "scenario.rounds=5\n"
      "scenario.warmup_rounds=8\n"
      "scenario.calibration_trials=60\n"
      "scenario.temperature=sweep:-25:85\n"
      "scenario.adversary=stolen_server_keys\n"
      "scenario.adversary_attempts=20\n";
  const std::pair<const char*, std::string> commands[4] = {
      {"distribution", "seed=808\npopulation.count=4000\n"},
      {"drift", "seed=808\npopulation.count=4000\n"},
      {"sigma-ratio", "seed=808\nsigmaratio.count=4000\n"},
      {"protocol", protocol_cfg},
  };

  for (const auto& [command, body] : commands) {
    const fs::path config_path = dir / (std::string(command) + ".cfg");
    {
      std::ofstream out(config_path);
      out << body;
    }
    CmdOutput first, second;
    for (CmdOutput* run : {&first, &second}) {
      CmdOverrides overrides;
      overrides.out_path =
          (dir / (std::string(command) + (run == &first ? "_a" : "_b") +
                  ".csv"))
              .string();
      *run = run_command(command, config_path.string(), overrides);
    }
    if (first.files.size() != second.files.size())
      return {false, std::string(command) + ": file sets differ"};
    for (std::size_t i = 0; i < first.files.size(); ++i) {
      if (first.files[i].second != second.files[i].second)
        return {false, std::string(command) + ": " + first.files[i].first +
                           " differs between reruns"};
      // and the on-disk bytes match what the engine produced
      std::ifstream in(first.files[i].first, std::ios::binary);
      std::ostringstream disk;
      disk << in.rdbuf();
      if (disk.str() != first.files[i].second)
        return {false, std::string(command) + ": disk bytes differ"};
    }
  }
  fs::remove_all(dir);
  return {true, "4 commands byte-identical across reruns, " +
                    fmt(seconds_since(start)) + "s"};
}

using CriterionFn = Outcome (*)();

struct Criterion {
  int number;
  const char* name;
  CriterionFn fn;
};

const Criterion kCriteria[] = {
    {1, "error-vector oracle equivalence", criterion1},
    {2, "distribution reproduction", criterion2},
    {3, "drift asymmetry directional check", criterion3},
    {4, "sigma-ratio trend", criterion4},
    {5, "ternary margin claim", criterion5},
    {6, "predictor exactness and separation", criterion6},
    {7, "protocol completeness and containment", criterion7},
    {8, "seeded determinism", criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (only != 0 && criterion.number != only) continue;
    Outcome outcome;
    try {
      outcome = criterion.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s — %s\n",
                outcome.pass ? "PASS" : "FAIL", criterion.number,
                criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
