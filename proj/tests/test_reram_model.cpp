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

#include <cmath>

#include "core/reram_model.hpp"
#include "doctest.h"

using namespace pufsim;

namespace {

PopulationParams default_params(std::uint32_t count, double sigma_cell = 0.05) {
  PopulationParams params;
  params.cell_count = count;
  params.sigma_cell_law = SigmaCellLaw::constant(sigma_cell);
  return params;
}

}  // namespace

TEST_CASE("sampled population matches the configured mean and sd") {
  const PufArray array = sample_array(default_params(10000), DriftLaw{}, 99);
  double sum = 0.0;
  for (const auto& cell : array.cells) sum += cell.mu_cell;
  const double mean = sum / array.cells.size();
  double var = 0.0;
  for (const auto& cell : array.cells)
    var += (cell.mu_cell - mean) * (cell.mu_cell - mean);
  const double sd = std::sqrt(var / (array.cells.size() - 1));

  // 4 standard errors around the population parameters
  CHECK(mean > 2.1 - 4 * 0.54 / 100.0);
  CHECK(mean < 2.1 + 4 * 0.54 / 100.0);
  CHECK(sd > 0.52);
  CHECK(sd < 0.56);
}

TEST_CASE("identical seed reproduces the identical array") {
  PopulationParams params = default_params(1);
  const PufArray a = sample_array(params, DriftLaw{}, 1234);
  const PufArray b = sample_array(params, DriftLaw{}, 1234);
  CHECK(a.cells[0].mu_cell == b.cells[0].mu_cell);
  const PufArray c = sample_array(params, DriftLaw{}, 1235);
  CHECK(a.cells[0].mu_cell != c.cells[0].mu_cell);
}

TEST_CASE("degenerate sigma_pop concentrates every cell at the mean") {
  PopulationParams params = default_params(100);
  params.sigma_pop = 1e-9;
  const PufArray array = sample_array(params, DriftLaw{}, 5);
  for (const auto& cell : array.cells)
    CHECK(std::abs(cell.mu_cell - 2.1) < 1e-6);
}

TEST_CASE("invalid population parameters are rejected") {
  PopulationParams params = default_params(0);
  CHECK_THROWS_AS(sample_array(params, DriftLaw{}, 1), Error);
  params = default_params(10);
  params.sigma_pop = 0.0;
  CHECK_THROWS_AS(sample_array(params, DriftLaw{}, 1), Error);
  params = default_params(10);
  DriftLaw positive;
  positive.temp_coefficient = 0.001;
  CHECK_THROWS_AS(sample_array(params, positive, 1), Error);
}

TEST_CASE("measurement applies the affine drift law exactly") {
  PopulationParams params = default_params(4, 0.0);
  params.sigma_pop = 1e-12;
  const PufArray array = sample_array(params, DriftLaw{}, 77);

  Environment reference;
  CHECK(measure_vset(array, 0, reference, 1) ==
        doctest::Approx(array.cells[0].mu_cell).epsilon(1e-12));

  // -0.005 V/degC, 30 degC above reference: 2.1 -> 1.95
  Environment hot;
  hot.temperature_c = 55.0;
  CHECK(measure_vset(array, 0, hot, 1) ==
        doctest::Approx(array.cells[0].mu_cell - 0.15).epsilon(1e-12));

  // +0.3 V bias at reference temperature: 2.1 -> 2.4
  Environment biased;
  biased.bias_offset_v = 0.3;
  CHECK(measure_vset(array, 0, biased, 1) ==
        doctest::Approx(array.cells[0].mu_cell + 0.3).epsilon(1e-12));
}

TEST_CASE("raising temperature strictly lowers the noiseless measurement") {
  PopulationParams params = default_params(1, 0.0);
  const PufArray array = sample_array(params, DriftLaw{}, 3);
  double previous = 1e9;
  for (double t : {-25.0, 0.0, 25.0, 55.0, 85.0}) {
    Environment env;
    env.temperature_c = t;
    const double v = measure_vset(array, 0, env, 9);
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("unknown cell id raises a lookup error") {
  const PufArray array = sample_array(default_params(4), DriftLaw{}, 8);
  CHECK_THROWS_AS(measure_vset(array, 4, Environment{}, 1), Error);
}

TEST_CASE("environment outside the validity window is rejected") {
  const PufArray array = sample_array(default_params(4), DriftLaw{}, 8);
  Environment too_cold;
  too_cold.temperature_c = -100.0;
  CHECK_THROWS_AS(measure_vset(array, 0, too_cold, 1), Error);
}

TEST_CASE("sweep equals elementwise measurements and is seed-stable") {
  const PufArray array = sample_array(default_params(32), DriftLaw{}, 21);
  Environment env;
  env.temperature_c = 40.0;
  const auto sweep = measure_sweep(array, env, 555);
  REQUIRE(sweep.size() == 32);
  for (std::uint32_t i = 0; i < 32; ++i)
    CHECK(sweep[i] == measure_vset(array, i, env, 555));
  CHECK(sweep == measure_sweep(array, env, 555));
  CHECK(sweep != measure_sweep(array, env, 556));
}

TEST_CASE("zero-noise sweep returns the true means") {
  const PufArray array = sample_array(default_params(3, 0.0), DriftLaw{}, 4);
  const auto sweep = measure_sweep(array, Environment{}, 1);
  const auto mu = true_means(array);
  CHECK(sweep == mu);
}

TEST_CASE("mean sweep shift follows the bias offset") {
  const PufArray array = sample_array(default_params(10000), DriftLaw{}, 31);
  Environment env;
  const auto base = measure_sweep(array, env, 41);
  env.bias_offset_v = 0.15;
  const auto shifted = measure_sweep(array, env, 42);
  double diff = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) diff += shifted[i] - base[i];
  diff /= base.size();
  CHECK(diff > 0.145);
  CHECK(diff < 0.155);
}

TEST_CASE("per-cell streams are independent of measurement order") {
  // The concurrency contract: randomness is derived per (seed, cell_id), so
  // measuring a sub-range or a single cell must reproduce the sweep values.
  const PufArray array = sample_array(default_params(64), DriftLaw{}, 13);
  Environment env;
  env.temperature_c = 31.0;
  const auto full = measure_sweep(array, env, 77);
  const auto tail = measure_range(array, {32, 64}, env, 77);
  for (std::uint32_t i = 0; i < 32; ++i) CHECK(tail[i] == full[32 + i]);
  for (std::uint32_t id : {63u, 7u, 40u})
    CHECK(measure_vset(array, id, env, 77) == full[id]);
}

TEST_CASE("piecewise sigma law interpolates and clamps") {
  const auto law = SigmaCellLaw::table({{2.0, 0.04}, {3.0, 0.08}});
  CHECK(law(1.0) == doctest::Approx(0.04));
  CHECK(law(2.5) == doctest::Approx(0.06));
  CHECK(law(4.0) == doctest::Approx(0.08));
  CHECK_THROWS_AS(SigmaCellLaw::table({{2.0, -0.01}}), Error);
  CHECK_THROWS_AS(SigmaCellLaw::table({}), Error);
}

TEST_CASE("sweep csv lists cells in order") {
  const PufArray array = sample_array(default_params(2, 0.0), DriftLaw{}, 4);
  const auto csv = sweep_to_csv(measure_sweep(array, Environment{}, 1));
  CHECK(csv.rfind("cell_id,vset_volts\n0,", 0) == 0);
}
