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

#include "core/reram_model.hpp"

#include <algorithm>
#include <span>

#include "core/csv.hpp"
#include "core/rng.hpp"

namespace pufsim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
    case ErrorCode::ProtocolOrder: return "protocol_order";
    case ErrorCode::DecryptFailed: return "decrypt_failed";
    case ErrorCode::ConfigError: return "config_error";
    case ErrorCode::IoError: return "io_error";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

SigmaCellLaw SigmaCellLaw::constant(double sigma) {
  if (sigma < 0.0)
    throw Error(ErrorCode::InvalidArgument, "sigma_cell must be >= 0");
  return SigmaCellLaw({{0.0, sigma}});
}

SigmaCellLaw SigmaCellLaw::table(
    std::vector<std::pair<double, double>> points) {
  if (points.empty())
    throw Error(ErrorCode::InvalidArgument, "sigma_cell table is empty");
  std::sort(points.begin(), points.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second < 0.0)
      throw Error(ErrorCode::InvalidArgument,
                  "sigma_cell table has a negative sigma");
    if (i > 0 && points[i].first == points[i - 1].first)
      throw Error(ErrorCode::InvalidArgument,
                  "sigma_cell table has duplicate mu keys");
  }
  return SigmaCellLaw(std::move(points));
}

double SigmaCellLaw::operator()(double mu_cell) const {
  if (points_.size() == 1) return points_.front().second;
  if (mu_cell <= points_.front().first) return points_.front().second;
  if (mu_cell >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(
      points_.begin(), points_.end(), mu_cell,
      [](double v, const auto& p) { return v < p.first; });
  auto lo = hi - 1;
  const double t = (mu_cell - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

void PopulationParams::validate() const {
  if (!(mu_pop > 0.0))
    throw Error(ErrorCode::InvalidArgument, "mu_pop must be > 0");
  if (!(sigma_pop > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sigma_pop must be > 0");
  if (cell_count < 1)
    throw Error(ErrorCode::InvalidArgument, "cell_count must be >= 1");
  // The law must stay nonnegative over the +/- 4 sigma sampling window;
  // clamped endpoints make this equivalent to checking the table itself,
  // which SigmaCellLaw construction already did.
  const double lo = mu_pop - 4.0 * sigma_pop;
  const double hi = mu_pop + 4.0 * sigma_pop;
  for (double mu : {lo, hi}) {
    if (sigma_cell_law(mu) < 0.0)
      throw Error(ErrorCode::InvalidArgument,
                  "sigma_cell_law negative in the sampling window");
  }
}

void Environment::validate() const {
  if (temperature_c < -55.0 || temperature_c > 150.0)
    throw Error(ErrorCode::InvalidArgument,
                "temperature outside simulation validity window [-55, 150]");
}

void DriftLaw::validate() const {
  if (!(temp_coefficient < 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "temp_coefficient must be negative");
}

PufArray sample_array(const PopulationParams& params, const DriftLaw& drift,
                      std::uint64_t seed) {
  params.validate();
  drift.validate();
  PufArray array;
  array.params = params;
  array.drift = drift;
  array.cells.reserve(params.cell_count);
  for (std::uint32_t i = 0; i < params.cell_count; ++i) {
    rng::Stream stream(rng::derive(seed, i, rng::tag::kSampleMu));
    double mu = stream.next_normal(params.mu_pop, params.sigma_pop);
    while (mu <= 0.0) mu = stream.next_normal(params.mu_pop, params.sigma_pop);
    array.cells.push_back({i, mu, params.sigma_cell_law(mu)});
  }
  return array;
}

double measure_vset(const PufArray& array, std::uint32_t cell_id,
                    const Environment& env, std::uint64_t seed) {
  env.validate();
  if (cell_id >= array.cells.size())
    throw Error(ErrorCode::NotFound, "unknown cell_id");
  const CellModel& cell = array.cells[cell_id];
  rng::Stream stream(rng::derive(seed, cell_id, rng::tag::kMeasure));
  return cell.mu_cell + array.drift.shift(env) +
         cell.sigma_cell * stream.next_normal();
}

std::vector<double> measure_sweep(const PufArray& array, const Environment& env,
                                  std::uint64_t seed) {
  return measure_range(
      array, {0, static_cast<std::uint32_t>(array.cells.size())}, env, seed);
}

std::vector<double> measure_range(const PufArray& array, CellRange range,
                                  const Environment& env, std::uint64_t seed) {
  env.validate();
  if (range.end > array.cells.size() || range.begin > range.end)
    throw Error(ErrorCode::InvalidArgument, "cell range outside array");
  const double shift = array.drift.shift(env);
  std::vector<double> out;
  out.reserve(range.count());
  for (std::uint32_t id = range.begin; id < range.end; ++id) {
    const CellModel& cell = array.cells[id];
    rng::Stream stream(rng::derive(seed, id, rng::tag::kMeasure));
    out.push_back(cell.mu_cell + shift + cell.sigma_cell * stream.next_normal());
  }
  return out;
}

std::vector<double> true_means(const PufArray& array) {
  return true_means(array, {0, static_cast<std::uint32_t>(array.cells.size())});
}

std::vector<double> true_means(const PufArray& array, CellRange range) {
  if (range.end > array.cells.size() || range.begin > range.end)
    throw Error(ErrorCode::InvalidArgument, "cell range outside array");
  std::vector<double> out;
  out.reserve(range.count());
  for (std::uint32_t id = range.begin; id < range.end; ++id)
    out.push_back(array.cells[id].mu_cell);
  return out;
}

std::string sweep_to_csv(std::span<const double> sweep) {
  std::string out = "cell_id,vset_volts\n";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    out += csv::number(static_cast<std::uint64_t>(i));
    out += ',';
    out += csv::number(sweep[i]);
    out += '\n';
  }
  return out;
}

}  // namespace pufsim
