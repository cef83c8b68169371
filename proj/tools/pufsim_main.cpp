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

// Thin front end over the pufsim shared library's C API.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 1 anything else.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "pufsim.h"

namespace {

int run(const std::string& command, const std::string& config_path,
        bool has_seed, std::uint64_t seed, const std::string& out_path) {
  const pufsim_status status = pufsim_run_command(
      command.c_str(), config_path.c_str(), has_seed ? 1 : 0, seed,
      out_path.empty() ? nullptr : out_path.c_str());
  if (status == PUFSIM_OK) return 0;
  std::fprintf(stderr, "pufsim %s: %s: %s\n", command.c_str(),
               pufsim_status_name(status), pufsim_last_error());
  switch (status) {
    case PUFSIM_ERR_CONFIG:
    case PUFSIM_ERR_INVALID_ARGUMENT:
      return 2;
    case PUFSIM_ERR_IO:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ReRAM PUF population simulator: multi-state challenge/response "
      "statistics and the two-challenge mutual-authentication protocol"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool has_seed = false;

  const char* names[] = {"distribution", "drift", "sigma-ratio", "protocol"};
  const char* blurbs[] = {
      "cumulative set-voltage distribution of a sampled array",
      "per-state error vectors across drifted response levels",
      "mean multi-state error across a sigma_pop/sigma_cell grid",
      "run the authentication protocol scenario"};
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { has_seed = true; });
    sub->add_option("--out", out_path, "override the output path");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  return run(command, config_path, has_seed, seed, out_path);
}
