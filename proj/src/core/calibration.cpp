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

#include "core/calibration.hpp"

#include <algorithm>

#include "core/rng.hpp"

namespace pufsim {

Environment env_at(const EnvRange& range, double t01, double b01) {
  Environment env;
  env.temperature_c = range.temp_lo + (range.temp_hi - range.temp_lo) * t01;
  env.bias_offset_v = range.bias_lo + (range.bias_hi - range.bias_lo) * b01;
  return env;
}

PredictorModel train_on_env_grid(const PufArray& array, CellRange range,
                                 const StateQuantizer& quantizer,
                                 const StateWord& challenge,
                                 const EnvRange& env_range,
                                 std::uint32_t observations, std::uint64_t seed,
                                 PredictorOptions options) {
  if (observations == 0)
    throw Error(ErrorCode::InvalidArgument, "need at least one observation");
  std::vector<ObservationRecord> history;
  history.reserve(observations);
  for (std::uint32_t t = 0; t < observations; ++t) {
    const double frac =
        observations == 1 ? 0.0
                          : static_cast<double>(t) / (observations - 1);
    const Environment env = env_at(env_range, frac, frac);
    const auto sweep = measure_range(array, range, env,
                                     rng::derive(seed, rng::tag::kTrial, t));
    const ErrorVector ve = error_vector(challenge, encode(sweep, quantizer));
    history.push_back({env.inputs(), ve, t});
  }
  return PredictorModel::fit(challenge.n_states, 2, std::move(history),
                             options);
}

namespace {

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  if (values.empty()) return 0.0;
  const double idx = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double t = idx - lo;
  return values[lo] * (1.0 - t) + values[hi] * t;
}

}  // namespace

CalibrationResult calibrate_threshold(const PufArray& array, CellRange range,
                                      const StateQuantizer& quantizer,
                                      const StateWord& challenge,
                                      const PredictorModel& model,
                                      const EnvRange& env_range,
                                      std::uint32_t trials,
                                      std::uint64_t seed) {
  if (trials < 2)
    throw Error(ErrorCode::InvalidArgument, "calibration needs >= 2 trials");

  std::vector<double> genuine;
  genuine.reserve(trials);
  for (std::uint32_t t = 0; t < trials; ++t) {
    rng::Stream pick(rng::derive(seed, rng::tag::kCalGenuine, t, 1));
    const Environment env = env_at(env_range, pick.next_unit(), pick.next_unit());
    const auto sweep = measure_range(
        array, range, env, rng::derive(seed, rng::tag::kCalGenuine, t));
    const ErrorVector ve = error_vector(challenge, encode(sweep, quantizer));
    genuine.push_back(ve_distance(ve, model.predict(env.inputs())));
  }

  PopulationParams impostor_params = array.params;
  impostor_params.cell_count = range.count();
  std::vector<double> impostor;
  impostor.reserve(trials);
  for (std::uint32_t t = 0; t < trials; ++t) {
    rng::Stream pick(rng::derive(seed, rng::tag::kCalImpostor, t, 1));
    const Environment env = env_at(env_range, pick.next_unit(), pick.next_unit());
    const PufArray fake =
        sample_array(impostor_params, array.drift,
                     rng::derive(seed, rng::tag::kCalImpostor, t, 2));
    const auto sweep =
        measure_range(fake, {0, impostor_params.cell_count}, env,
                      rng::derive(seed, rng::tag::kCalImpostor, t, 3));
    const ErrorVector ve = error_vector(challenge, encode(sweep, quantizer));
    impostor.push_back(ve_distance(ve, model.predict(env.inputs())));
  }

  CalibrationResult result;
  result.genuine_p99 = percentile(std::move(genuine), 0.99);
  result.impostor_p01 = percentile(std::move(impostor), 0.01);
  result.threshold = 0.5 * (result.genuine_p99 + result.impostor_p01);
  return result;
}

}  // namespace pufsim
