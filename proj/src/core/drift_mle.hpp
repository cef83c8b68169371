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

#ifndef PUFSIM_CORE_DRIFT_MLE_HPP
#define PUFSIM_CORE_DRIFT_MLE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/multistate_codec.hpp"
#include "core/types.hpp"

namespace pufsim {

/// One authentication's learning datum: the environmental inputs under which
/// the response was produced, and the error vector it yielded.
struct ObservationRecord {
  std::vector<double> inputs;
  ErrorVector ve;
  std::uint64_t timestamp = 0;
};

struct PredictorOptions {
  std::uint32_t min_history = 3;
  std::uint32_t capacity = 256;
  // Drift moves responses away from the enrollment point in either
  // direction, so per-state errors rise on both sides of the reference
  // temperature. A |T - reference| basis column lets the linear fit track
  // that fold; it is inert on one-sided or purely affine histories.
  bool temperature_hinge = true;
  double hinge_reference = 25.0;
};

struct AuthDecision {
  bool accepted = false;
  double distance = 0.0;
  double threshold = 0.0;
  ErrorVector predicted_ve;
  ErrorVector observed_ve;
};

/// Occupancy-weighted normalized L1 distance between an observed and a
/// predicted error vector; zero-occupancy states are excluded. Weights come
/// from the observed vector (the cells that were actually scored).
double ve_distance(const ErrorVector& observed, const ErrorVector& predicted);

/// Per-state affine predictor of error vectors from environment inputs.
///
/// With at least min_history records the model is a least-squares affine fit
/// of each state's error against the inputs; below that it predicts the
/// historical mean vector, and with no history at all it predicts all zeros.
/// Models are immutable values: update() returns a refit copy with the new
/// record appended (bounded ring, oldest evicted).
class PredictorModel {
 public:
  PredictorModel(std::uint16_t n_states, std::uint32_t input_dim,
                 PredictorOptions options = {});

  static PredictorModel fit(std::uint16_t n_states, std::uint32_t input_dim,
                            std::vector<ObservationRecord> history,
                            PredictorOptions options = {});

  ErrorVector predict(std::span<const double> inputs) const;

  AuthDecision decide(const ErrorVector& observed,
                      std::span<const double> inputs, double threshold) const;

  PredictorModel update(ObservationRecord record) const;

  std::uint16_t n_states() const { return n_states_; }
  std::uint32_t input_dim() const { return input_dim_; }
  const std::vector<ObservationRecord>& history() const { return history_; }
  const PredictorOptions& options() const { return options_; }
  bool affine_active() const { return affine_active_; }
  /// Fitted coefficients for state i: [intercept, slope_0 .. slope_{m-1},
  /// hinge slope (when the temperature hinge is enabled)].
  std::vector<double> coefficients(std::uint16_t state) const;

  /// Versioned text document (fields n_states, m, coefficients, history)
  /// so server restarts preserve learning state.
  std::string export_text() const;
  static PredictorModel import_text(const std::string& text);

 private:
  void refit();
  std::size_t basis_dim() const;
  std::vector<double> basis_row(std::span<const double> inputs) const;

  std::uint16_t n_states_;
  std::uint32_t input_dim_;
  PredictorOptions options_;
  std::vector<ObservationRecord> history_;
  bool affine_active_ = false;
  std::vector<std::vector<double>> coeff_;  // per state: intercept + slopes
  std::vector<double> mean_ve_;             // fallback prediction
};

}  // namespace pufsim

#endif
