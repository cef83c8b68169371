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

#ifndef PUFSIM_CORE_RERAM_MODEL_HPP
#define PUFSIM_CORE_RERAM_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace pufsim {

/// One simulated ReRAM cell: the cell's true mean set voltage and the
/// standard deviation of repeated measurements of that cell.
struct CellModel {
  std::uint32_t cell_id = 0;
  double mu_cell = 0.0;     // volts, > 0
  double sigma_cell = 0.0;  // volts, >= 0
};

/// Maps a cell's mean set voltage to its intra-cell measurement sigma.
/// Either a constant or a piecewise-linear table keyed on mu_cell; values
/// outside the table clamp to the nearest endpoint.
class SigmaCellLaw {
 public:
  SigmaCellLaw() : SigmaCellLaw(constant(0.05)) {}

  static SigmaCellLaw constant(double sigma);
  static SigmaCellLaw table(std::vector<std::pair<double, double>> points);

  double operator()(double mu_cell) const;
  bool is_constant() const { return points_.size() == 1; }
  const std::vector<std::pair<double, double>>& points() const {
    return points_;
  }

 private:
  explicit SigmaCellLaw(std::vector<std::pair<double, double>> points)
      : points_(std::move(points)) {}

  std::vector<std::pair<double, double>> points_;  // sorted by mu
};

struct PopulationParams {
  double mu_pop = 2.1;
  double sigma_pop = 0.54;
  std::uint32_t cell_count = 0;
  SigmaCellLaw sigma_cell_law = SigmaCellLaw::constant(0.05);

  void validate() const;
};

/// Ambient conditions for one measurement. Temperature is bounded to the
/// window the simulation was parameterized for.
struct Environment {
  double temperature_c = 25.0;
  double bias_offset_v = 0.0;

  void validate() const;
  std::vector<double> inputs() const { return {temperature_c, bias_offset_v}; }
};

/// Affine mean-shift law: shift = temp_coefficient * (T - T_ref) + bias.
/// The coefficient is negative (hotter cells set at lower voltage); at the
/// reference temperature with zero bias the shift is exactly zero.
struct DriftLaw {
  double temp_coefficient = -0.005;  // volts per degree C, < 0
  double reference_temp_c = 25.0;

  void validate() const;
  double shift(const Environment& env) const {
    return temp_coefficient * (env.temperature_c - reference_temp_c) +
           env.bias_offset_v;
  }
};

struct PufArray {
  std::vector<CellModel> cells;
  PopulationParams params;
  DriftLaw drift;
};

/// Draws a fresh array: mu_cell ~ Normal(mu_pop, sigma_pop^2) independently
/// per cell (redrawn on the rare nonpositive sample), sigma_cell assigned via
/// the sigma law. Identical seed reproduces an identical array bit-for-bit.
PufArray sample_array(const PopulationParams& params, const DriftLaw& drift,
                      std::uint64_t seed);

/// One noisy measurement of one cell under the given environment:
/// mu_cell + drift.shift(env) + Normal(0, sigma_cell^2). Per-cell streams are
/// derived from (seed, cell_id), so values are reproducible and independent.
double measure_vset(const PufArray& array, std::uint32_t cell_id,
                    const Environment& env, std::uint64_t seed);

/// Batch form of measure_vset, one value per cell in cell order.
std::vector<double> measure_sweep(const PufArray& array, const Environment& env,
                                  std::uint64_t seed);

std::vector<double> measure_range(const PufArray& array, CellRange range,
                                  const Environment& env, std::uint64_t seed);

/// The array's noiseless values (mu_cell per cell); the enrollment basis.
std::vector<double> true_means(const PufArray& array);

std::vector<double> true_means(const PufArray& array, CellRange range);

/// Sweep export, columns cell_id,vset_volts.
std::string sweep_to_csv(std::span<const double> sweep);

}  // namespace pufsim

#endif
