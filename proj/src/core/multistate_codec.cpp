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

#include "core/multistate_codec.hpp"

#include <algorithm>
#include <cstdlib>

#include "core/csv.hpp"

namespace pufsim {

void StateQuantizer::validate() const {
  if (n_states < 2)
    throw Error(ErrorCode::InvalidArgument, "n_states must be >= 2");
  if (boundaries.size() != static_cast<std::size_t>(n_states) - 1)
    throw Error(ErrorCode::InvalidArgument,
                "quantizer needs n_states - 1 boundaries");
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (!(boundaries[i - 1] < boundaries[i]))
      throw Error(ErrorCode::InvalidArgument,
                  "quantizer boundaries must be strictly increasing");
  }
}

StateQuantizer calibrate_quantizer(std::span<const double> sweep,
                                   std::uint16_t n_states) {
  if (n_states < 2)
    throw Error(ErrorCode::InvalidArgument, "n_states must be >= 2");
  if (sweep.size() < n_states)
    throw Error(ErrorCode::InvalidArgument,
                "calibration sweep shorter than n_states");
  std::vector<double> sorted(sweep.begin(), sweep.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  StateQuantizer q;
  q.n_states = n_states;
  q.boundaries.reserve(n_states - 1);
  for (std::uint16_t k = 1; k < n_states; ++k) {
    // Cut after floor(k*N/n) elements, midway to the next order statistic,
    // so each state's occupancy lands within one cell of N/n.
    const std::size_t cut = (k * n) / n_states;
    q.boundaries.push_back(0.5 * (sorted[cut - 1] + sorted[cut]));
  }
  q.validate();
  // Ties across a cut collapse states; enforce the equal-occupancy
  // guarantee on the calibration sweep itself.
  std::vector<std::uint32_t> counts(n_states, 0);
  for (double v : sorted) counts[encode_value(v, q)]++;
  const double ideal = static_cast<double>(n) / n_states;
  for (std::uint32_t c : counts) {
    if (std::abs(static_cast<double>(c) - ideal) > 1.0)
      throw Error(ErrorCode::InvalidArgument,
                  "sweep lacks enough distinct values for balanced states");
  }
  return q;
}

std::uint16_t encode_value(double v, const StateQuantizer& q) {
  // First boundary >= v; everything before it is < v. A value equal to a
  // boundary therefore stays in the lower state.
  auto it = std::lower_bound(q.boundaries.begin(), q.boundaries.end(), v);
  return static_cast<std::uint16_t>(it - q.boundaries.begin());
}

StateWord encode(std::span<const double> sweep, const StateQuantizer& q) {
  q.validate();
  StateWord word;
  word.n_states = q.n_states;
  word.states.reserve(sweep.size());
  for (double v : sweep) word.states.push_back(encode_value(v, q));
  return word;
}

ErrorVector error_vector(const StateWord& challenge,
                         const StateWord& response) {
  if (challenge.states.size() != response.states.size())
    throw Error(ErrorCode::ShapeMismatch,
                "challenge/response length mismatch");
  if (challenge.n_states != response.n_states)
    throw Error(ErrorCode::ShapeMismatch,
                "challenge/response n_states mismatch");
  const std::uint16_t n = challenge.n_states;
  std::vector<std::uint64_t> sums(n, 0);
  std::vector<std::uint32_t> counts(n, 0);
  for (std::size_t k = 0; k < challenge.states.size(); ++k) {
    const std::uint16_t c = challenge.states[k];
    const std::uint16_t r = response.states[k];
    if (c >= n || r >= n)
      throw Error(ErrorCode::ShapeMismatch, "state index out of range");
    sums[c] += static_cast<std::uint64_t>(c > r ? c - r : r - c);
    counts[c] += 1;
  }
  ErrorVector ve;
  ve.errors.resize(n, 0.0);
  ve.occupancies = std::move(counts);
  for (std::uint16_t i = 0; i < n; ++i) {
    if (ve.occupancies[i] > 0)
      ve.errors[i] = static_cast<double>(sums[i]) / ve.occupancies[i];
  }
  return ve;
}

TernaryWord ternary_encode(std::span<const double> sweep, double threshold_t,
                           double margin) {
  if (margin < 0.0)
    throw Error(ErrorCode::InvalidArgument, "margin must be >= 0");
  TernaryWord word;
  word.threshold_t = threshold_t;
  word.margin = margin;
  word.symbols.reserve(sweep.size());
  for (double v : sweep) {
    if (v <= threshold_t - margin)
      word.symbols.push_back(Ternary::Zero);
    else if (v >= threshold_t + margin)
      word.symbols.push_back(Ternary::One);
    else
      word.symbols.push_back(Ternary::X);
  }
  return word;
}

double ternary_crp_error(const TernaryWord& challenge,
                         const TernaryWord& response) {
  if (challenge.symbols.size() != response.symbols.size())
    throw Error(ErrorCode::ShapeMismatch, "ternary word length mismatch");
  std::size_t scored = 0, mismatched = 0;
  for (std::size_t k = 0; k < challenge.symbols.size(); ++k) {
    if (challenge.symbols[k] == Ternary::X) continue;
    ++scored;
    if (response.symbols[k] != challenge.symbols[k]) ++mismatched;
  }
  return scored == 0 ? 0.0 : static_cast<double>(mismatched) / scored;
}

std::string word_to_csv(const StateWord& word) {
  std::string out = "cell_id,state\n";
  for (std::size_t i = 0; i < word.states.size(); ++i) {
    out += csv::number(static_cast<std::uint64_t>(i));
    out += ',';
    out += csv::number(static_cast<std::uint64_t>(word.states[i]));
    out += '\n';
  }
  return out;
}

std::string error_vector_to_csv(const ErrorVector& ve) {
  std::string out = "state_index,error,occupancy\n";
  for (std::size_t i = 0; i < ve.errors.size(); ++i) {
    out += csv::number(static_cast<std::uint64_t>(i));
    out += ',';
    out += csv::number(ve.errors[i]);
    out += ',';
    out += csv::number(static_cast<std::uint64_t>(ve.occupancies[i]));
    out += '\n';
  }
  return out;
}

}  // namespace pufsim
