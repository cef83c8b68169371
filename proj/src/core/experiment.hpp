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

#ifndef PUFSIM_CORE_EXPERIMENT_HPP
#define PUFSIM_CORE_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/netsim.hpp"

namespace pufsim {

struct CmdOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
};

/// Everything a command produced, keyed by destination path. Commands build
/// outputs fully in memory; write_outputs() puts them on disk.
struct CmdOutput {
  std::vector<std::pair<std::string, std::string>> files;

  const std::string& file(const std::string& path) const;
};

/// Cumulative set-voltage distribution of a sampled array plus a summary
/// line with the sample mean/SD; optionally a raw measured sweep.
CmdOutput cmd_distribution(const KvConfig& config,
                           const CmdOverrides& overrides = {});

/// Per-state mean error vectors for responses drifted to each configured
/// effective mean level, against challenges enrolled at the base level.
CmdOutput cmd_drift_analysis(const KvConfig& config,
                             const CmdOverrides& overrides = {});

/// Mean multi-state error across a grid of population-vs-cell sigma pairs,
/// rows ordered by the sigma_pop/sigma_cell ratio.
CmdOutput cmd_sigma_ratio(const KvConfig& config,
                          const CmdOverrides& overrides = {});

/// Full protocol scenario (enrollment, warm-up, authentication rounds,
/// optional adversary attempts); emits the round CSV, transcript, and
/// optional attack CSV / identity store dump.
CmdOutput cmd_protocol(const KvConfig& config,
                       const CmdOverrides& overrides = {});

void write_outputs(const CmdOutput& output);

/// Loads the config file, dispatches on the subcommand name
/// (distribution | drift | sigma-ratio | protocol), writes the outputs.
CmdOutput run_command(const std::string& command,
                      const std::string& config_path,
                      const CmdOverrides& overrides = {});

/// Builds the netsim scenario from scenario.* / population.* / drift.* keys.
ScenarioConfig scenario_from_config(const KvConfig& config,
                                    const CmdOverrides& overrides = {});

}  // namespace pufsim

#endif
