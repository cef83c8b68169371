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

#include "core/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "core/csv.hpp"
#include "core/rng.hpp"

namespace pufsim {

namespace {

const std::vector<std::string> kKnownKeys = {
    "seed",
    "output.path",
    "population.mu",
    "population.sigma",
    "population.count",
    "population.sigma_cell",
    "population.sigma_cell_table",
    "drift.temp_coefficient",
    "drift.reference_temp_c",
    "distribution.sweep_path",
    "driftscan.levels",
    "driftscan.n_states",
    "driftscan.noise_sigma",
    "sigmaratio.n_states",
    "sigmaratio.count",
    "sigmaratio.grid",
    "scenario.device_count",
    "scenario.cells_per_device",
    "scenario.n_states",
    "scenario.rounds",
    "scenario.warmup_rounds",
    "scenario.temperature",
    "scenario.bias",
    "scenario.device_temp_offset",
    "scenario.drop_probability",
    "scenario.retries",
    "scenario.cipher",
    "scenario.adversary",
    "scenario.adversary_attempts",
    "scenario.adversary_target",
    "scenario.calibration_trials",
    "scenario.reenroll_after",
    "scenario.transcript_path",
    "scenario.attacks_path",
    "scenario.identity_store_path",
};

std::uint64_t seed_of(const KvConfig& config, const CmdOverrides& overrides) {
  if (overrides.seed) return *overrides.seed;
  return config.get_u64("seed", 1);
}

std::string out_of(const KvConfig& config, const CmdOverrides& overrides,
                   const std::string& fallback) {
  if (overrides.out_path) return *overrides.out_path;
  return config.get_string("output.path", fallback);
}

PopulationParams population_from(const KvConfig& config,
                                 std::uint32_t default_count) {
  PopulationParams params;
  params.mu_pop = config.get_double("population.mu", 2.1);
  params.sigma_pop = config.get_double("population.sigma", 0.54);
  params.cell_count = static_cast<std::uint32_t>(
      config.get_u64("population.count", default_count));
  if (config.has("population.sigma_cell_table")) {
    params.sigma_cell_law = SigmaCellLaw::table(
        config.get_pair_list("population.sigma_cell_table"));
  } else {
    params.sigma_cell_law =
        SigmaCellLaw::constant(config.get_double("population.sigma_cell", 0.05));
  }
  return params;
}

DriftLaw drift_from(const KvConfig& config) {
  DriftLaw drift;
  drift.temp_coefficient = config.get_double("drift.temp_coefficient", -0.005);
  drift.reference_temp_c = config.get_double("drift.reference_temp_c", 25.0);
  return drift;
}

EnvSchedule schedule_from(const KvConfig& config, const std::string& key,
                          double fallback) {
  EnvSchedule schedule;
  schedule.lo = schedule.hi = fallback;
  const std::string spec = config.get_string(key, "");
  if (spec.empty()) return schedule;
  const auto first = spec.find(':');
  const std::string kind = first == std::string::npos ? spec : spec.substr(0, first);
  const std::string rest = first == std::string::npos ? "" : spec.substr(first + 1);
  if (kind == "constant") {
    schedule.kind = EnvSchedule::Kind::Constant;
    schedule.lo = schedule.hi = std::strtod(rest.c_str(), nullptr);
  } else if (kind == "sweep") {
    const auto second = rest.find(':');
    if (second == std::string::npos)
      throw Error(ErrorCode::ConfigError, key + " sweep needs lo:hi");
    schedule.kind = EnvSchedule::Kind::Sweep;
    schedule.lo = std::strtod(rest.substr(0, second).c_str(), nullptr);
    schedule.hi = std::strtod(rest.substr(second + 1).c_str(), nullptr);
  } else if (kind == "list") {
    schedule.kind = EnvSchedule::Kind::List;
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t next = rest.find(',', pos);
      if (next == std::string::npos) next = rest.size();
      if (next > pos)
        schedule.values.push_back(
            std::strtod(rest.substr(pos, next - pos).c_str(), nullptr));
      pos = next + 1;
    }
    if (schedule.values.empty())
      throw Error(ErrorCode::ConfigError, key + " list is empty");
  } else {
    throw Error(ErrorCode::ConfigError,
                key + " must be constant:V, sweep:lo:hi, or list:a,b,...");
  }
  return schedule;
}

std::string file_stem(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path;
  return path.substr(0, dot);
}

}  // namespace

const std::string& CmdOutput::file(const std::string& path) const {
  for (const auto& [p, content] : files)
    if (p == path) return content;
  throw Error(ErrorCode::Internal, "no output produced for " + path);
}

CmdOutput cmd_distribution(const KvConfig& config,
                           const CmdOverrides& overrides) {
  config.require_known(kKnownKeys);
  const std::uint64_t seed = seed_of(config, overrides);
  const PopulationParams params = population_from(config, 10000);
  const DriftLaw drift = drift_from(config);
  const PufArray array =
      sample_array(params, drift, rng::derive(seed, rng::tag::kArray));

  std::vector<double> values = true_means(array);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd =
      values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;

  std::sort(values.begin(), values.end());
  std::string out = "vset_volts,cumulative_fraction\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += csv::number(values[i]);
    out += ',';
    out += csv::number(static_cast<double>(i + 1) /
                       static_cast<double>(values.size()));
    out += '\n';
  }
  out += "# mean=" + csv::number(mean) + " sd=" + csv::number(sd) + "\n";

  CmdOutput output;
  output.files.emplace_back(out_of(config, overrides, "distribution.csv"),
                            std::move(out));

  const std::string sweep_path = config.get_string("distribution.sweep_path", "");
  if (!sweep_path.empty()) {
    Environment env;
    env.temperature_c = drift.reference_temp_c;
    const auto sweep =
        measure_sweep(array, env, rng::derive(seed, rng::tag::kMeasure));
    output.files.emplace_back(sweep_path, sweep_to_csv(sweep));
  }
  return output;
}

CmdOutput cmd_drift_analysis(const KvConfig& config,
                             const CmdOverrides& overrides) {
  config.require_known(kKnownKeys);
  const std::uint64_t seed = seed_of(config, overrides);
  const PopulationParams params = population_from(config, 10000);
  const DriftLaw drift = drift_from(config);
  const auto n_states =
      static_cast<std::uint16_t>(config.get_u64("driftscan.n_states", 8));
  std::vector<double> levels = config.get_double_list("driftscan.levels");
  if (levels.empty()) levels = {1.8, 1.95, 2.1, 2.25, 2.4};

  const PufArray array =
      sample_array(params, drift, rng::derive(seed, rng::tag::kArray));
  const std::vector<double> mu = true_means(array);
  const StateQuantizer quantizer = calibrate_quantizer(mu, n_states);
  const StateWord challenge = encode(mu, quantizer);

  // Per-cell noise draws are shared across levels so the scan isolates the
  // mean-shift effect.
  const bool noise_override = config.has("driftscan.noise_sigma");
  const double noise_sigma = config.get_double("driftscan.noise_sigma", 0.0);
  std::vector<double> noise(mu.size());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const double sigma =
        noise_override ? noise_sigma : array.cells[i].sigma_cell;
    rng::Stream stream(rng::derive(seed, rng::tag::kDriftNoise, i));
    noise[i] = sigma * stream.next_normal();
  }

  std::string out = "drift_level_v,state_index,error,occupancy\n";
  std::vector<double> response(mu.size());
  for (double level : levels) {
    const double shift = level - params.mu_pop;
    for (std::size_t i = 0; i < mu.size(); ++i)
      response[i] = mu[i] + shift + noise[i];
    const ErrorVector ve = error_vector(challenge, encode(response, quantizer));
    for (std::uint16_t s = 0; s < n_states; ++s) {
      out += csv::number(level);
      out += ',';
      out += csv::number(static_cast<std::uint64_t>(s));
      out += ',';
      out += csv::number(ve.errors[s]);
      out += ',';
      out += csv::number(static_cast<std::uint64_t>(ve.occupancies[s]));
      out += '\n';
    }
  }

  CmdOutput output;
  output.files.emplace_back(out_of(config, overrides, "drift.csv"),
                            std::move(out));
  return output;
}

CmdOutput cmd_sigma_ratio(const KvConfig& config,
                          const CmdOverrides& overrides) {
  config.require_known(kKnownKeys);
  const std::uint64_t seed = seed_of(config, overrides);
  const auto n_states =
      static_cast<std::uint16_t>(config.get_u64("sigmaratio.n_states", 8));
  const auto count =
      static_cast<std::uint32_t>(config.get_u64("sigmaratio.count", 10000));
  const double mu_pop = config.get_double("population.mu", 2.1);
  auto grid = config.get_pair_list("sigmaratio.grid");
  if (grid.empty())
    grid = {{0.1, 0.05}, {0.15, 0.05}, {0.2, 0.05},
            {0.3, 0.05}, {0.4, 0.05},  {0.54, 0.05}};

  // Common random numbers across grid points: each cell keeps its population
  // quantile and its noise draw, so the scan varies only the two sigmas.
  std::vector<double> z(count), e(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    z[i] = rng::Stream(rng::derive(seed, rng::tag::kSampleMu, i)).next_normal();
    e[i] = rng::Stream(rng::derive(seed, rng::tag::kSigmaNoise, i)).next_normal();
  }

  struct Row {
    double ratio, sigma_pop, sigma_cell, mean_error;
  };
  std::vector<Row> rows;
  rows.reserve(grid.size());
  std::vector<double> mu(count), response(count);
  for (const auto& [sigma_pop, sigma_cell] : grid) {
    if (sigma_pop <= 0.0)
      throw Error(ErrorCode::ConfigError, "sigma_pop must be > 0");
    if (sigma_cell < 0.0)
      throw Error(ErrorCode::ConfigError, "sigma_cell must be >= 0");
    for (std::uint32_t i = 0; i < count; ++i) {
      mu[i] = mu_pop + sigma_pop * z[i];
      response[i] = mu[i] + sigma_cell * e[i];
    }
    const StateQuantizer quantizer = calibrate_quantizer(mu, n_states);
    const ErrorVector ve =
        error_vector(encode(mu, quantizer), encode(response, quantizer));
    double mean_error = 0.0;
    for (double err : ve.errors) mean_error += err;
    mean_error /= n_states;
    const double ratio = sigma_cell == 0.0
                             ? std::numeric_limits<double>::infinity()
                             : sigma_pop / sigma_cell;
    rows.push_back({ratio, sigma_pop, sigma_cell, mean_error});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.ratio < b.ratio; });

  std::string out = "ratio,sigma_pop,sigma_cell,mean_error\n";
  for (const Row& row : rows) {
    out += csv::number(row.ratio);
    out += ',';
    out += csv::number(row.sigma_pop);
    out += ',';
    out += csv::number(row.sigma_cell);
    out += ',';
    out += csv::number(row.mean_error);
    out += '\n';
  }

  CmdOutput output;
  output.files.emplace_back(out_of(config, overrides, "sigma_ratio.csv"),
                            std::move(out));
  return output;
}

ScenarioConfig scenario_from_config(const KvConfig& config,
                                    const CmdOverrides& overrides) {
  config.require_known(kKnownKeys);
  ScenarioConfig scenario;
  scenario.seed = seed_of(config, overrides);
  scenario.device_count =
      static_cast<std::uint32_t>(config.get_u64("scenario.device_count", 1));
  scenario.cells_per_device = static_cast<std::uint32_t>(
      config.get_u64("scenario.cells_per_device", 256));
  scenario.n_states =
      static_cast<std::uint16_t>(config.get_u64("scenario.n_states", 8));
  scenario.rounds =
      static_cast<std::uint32_t>(config.get_u64("scenario.rounds", 10));
  scenario.warmup_rounds =
      static_cast<std::uint32_t>(config.get_u64("scenario.warmup_rounds", 12));
  scenario.temperature = schedule_from(config, "scenario.temperature", 25.0);
  scenario.bias = schedule_from(config, "scenario.bias", 0.0);
  scenario.device_temp_offset =
      config.get_double("scenario.device_temp_offset", 0.0);
  scenario.drop_probability =
      config.get_double("scenario.drop_probability", 0.0);
  scenario.retries =
      static_cast<std::uint32_t>(config.get_u64("scenario.retries", 0));
  scenario.population = population_from(config, scenario.cells_per_device);
  scenario.population.cell_count = scenario.cells_per_device;
  scenario.drift = drift_from(config);
  scenario.cipher = config.get_string("scenario.cipher", "xor");
  scenario.calibration_trials = static_cast<std::uint32_t>(
      config.get_u64("scenario.calibration_trials", 200));
  scenario.reenroll_after = static_cast<std::uint32_t>(
      config.get_u64("scenario.reenroll_after", 0));
  scenario.adversary_attempts = static_cast<std::uint32_t>(
      config.get_u64("scenario.adversary_attempts", 0));

  const std::string preset = config.get_string("scenario.adversary", "none");
  const std::string target =
      config.get_string("scenario.adversary_target", "device-000");
  if (preset == "none") {
    if (scenario.adversary_attempts > 0)
      throw Error(ErrorCode::ConfigError,
                  "adversary_attempts require an adversary preset");
  } else if (preset == "unprivileged") {
    // no capabilities at all
  } else if (preset == "stolen_server_keys") {
    scenario.adversary.has_server_keys = true;
    scenario.adversary.can_replay = true;
  } else if (preset == "stolen_keys_plus_c1") {
    scenario.adversary.has_server_keys = true;
    scenario.adversary.has_c1 = target;
  } else if (preset == "stolen_device_keys") {
    scenario.adversary.has_device_keys = target;
  } else if (preset == "stolen_device_keys_plus_c2") {
    scenario.adversary.has_device_keys = target;
    scenario.adversary.has_c2 = target;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown adversary preset: " + preset);
  }
  return scenario;
}

CmdOutput cmd_protocol(const KvConfig& config, const CmdOverrides& overrides) {
  const ScenarioConfig scenario = scenario_from_config(config, overrides);
  Simulation sim(scenario);
  sim.setup();
  const ScenarioReport report = sim.run();

  const std::string out_path = out_of(config, overrides, "protocol.csv");
  const std::string stem = file_stem(out_path);

  CmdOutput output;
  output.files.emplace_back(out_path, report.rounds_csv());
  const std::string transcript_path = config.get_string(
      "scenario.transcript_path", stem + ".transcript.bin");
  const Bytes transcript = report.transcript_bytes();
  output.files.emplace_back(
      transcript_path, std::string(transcript.begin(), transcript.end()));
  if (scenario.adversary_attempts > 0) {
    output.files.emplace_back(
        config.get_string("scenario.attacks_path", stem + ".attacks.csv"),
        report.attacks_csv());
  }
  const std::string store_path =
      config.get_string("scenario.identity_store_path", "");
  if (!store_path.empty())
    output.files.emplace_back(store_path, identity_store_to_text(sim.server()));
  return output;
}

void write_outputs(const CmdOutput& output) {
  for (const auto& [path, content] : output.files) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorCode::IoError, "cannot open output file: " + path);
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write: " + path);
  }
}

CmdOutput run_command(const std::string& command,
                      const std::string& config_path,
                      const CmdOverrides& overrides) {
  const KvConfig config = KvConfig::load_file(config_path);
  CmdOutput output;
  if (command == "distribution") {
    output = cmd_distribution(config, overrides);
  } else if (command == "drift") {
    output = cmd_drift_analysis(config, overrides);
  } else if (command == "sigma-ratio") {
    output = cmd_sigma_ratio(config, overrides);
  } else if (command == "protocol") {
    output = cmd_protocol(config, overrides);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown command: " + command);
  }
  write_outputs(output);
  return output;
}

}  // namespace pufsim
