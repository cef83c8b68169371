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

#ifndef PUFSIM_CORE_CALIBRATION_HPP
#define PUFSIM_CORE_CALIBRATION_HPP

#include <cstdint>

#include "core/drift_mle.hpp"
#include "core/multistate_codec.hpp"
#include "core/reram_model.hpp"

namespace pufsim {

struct EnvRange {
  double temp_lo = 25.0;
  double temp_hi = 25.0;
  double bias_lo = 0.0;
  double bias_hi = 0.0;
};

Environment env_at(const EnvRange& range, double t01, double b01);

/// Deterministic training pass: observes the genuine device across an
/// evenly spaced grid of environments and fits the predictor on the
/// resulting (inputs, error vector) records.
PredictorModel train_on_env_grid(const PufArray& array, CellRange range,
                                 const StateQuantizer& quantizer,
                                 const StateWord& challenge,
                                 const EnvRange& env_range,
                                 std::uint32_t observations, std::uint64_t seed,
                                 PredictorOptions options = {});

struct CalibrationResult {
  double threshold = 0.0;
  double genuine_p99 = 0.0;
  double impostor_p01 = 0.0;
};

/// Seeded Monte-Carlo threshold pick: the midpoint between the 99th
/// percentile of genuine distances (same array under environmental drift)
/// and the 1st percentile of impostor distances (freshly sampled arrays
/// answering the same challenge).
CalibrationResult calibrate_threshold(const PufArray& array, CellRange range,
                                      const StateQuantizer& quantizer,
                                      const StateWord& challenge,
                                      const PredictorModel& model,
                                      const EnvRange& env_range,
                                      std::uint32_t trials, std::uint64_t seed);

}  // namespace pufsim

#endif
