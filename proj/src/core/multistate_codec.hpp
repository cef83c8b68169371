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

#ifndef PUFSIM_CORE_MULTISTATE_CODEC_HPP
#define PUFSIM_CORE_MULTISTATE_CODEC_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace pufsim {

/// n-state voltage quantizer. The n_states-1 boundaries are strictly
/// increasing; a value exactly on a boundary encodes into the lower state.
struct StateQuantizer {
  std::uint16_t n_states = 0;
  std::vector<double> boundaries;

  void validate() const;
};

/// A challenge or response: one state index per cell, in cell order.
struct StateWord {
  std::vector<std::uint16_t> states;
  std::uint16_t n_states = 0;
};

/// Per-state average CRP error. errors[i] averages |R_k - C_k| over the
/// cells whose challenge state is i; occupancies[i] is that cell count.
/// Empty states carry error 0 with occupancy 0.
struct ErrorVector {
  std::vector<double> errors;
  std::vector<std::uint32_t> occupancies;

  std::uint16_t n_states() const {
    return static_cast<std::uint16_t>(errors.size());
  }
};

/// Builds the equal-occupancy quantizer from a calibration sweep: boundaries
/// are cut midway between adjacent order statistics at the 1/n .. (n-1)/n
/// marks. On a sweep of distinct values the resulting occupancies satisfy
/// |n_i - N/n| <= 1 exactly.
StateQuantizer calibrate_quantizer(std::span<const double> sweep,
                                   std::uint16_t n_states);

std::uint16_t encode_value(double v, const StateQuantizer& q);

StateWord encode(std::span<const double> sweep, const StateQuantizer& q);

/// Eq.-style per-state average error between challenge and response.
/// Cells are grouped by their CHALLENGE state; each state's integer
/// distances are summed exactly and divided once at the end.
ErrorVector error_vector(const StateWord& challenge, const StateWord& response);

enum class Ternary : std::uint8_t { Zero = 0, One = 1, X = 2 };

/// Ternary classification around threshold T: ZERO iff v <= T - margin,
/// ONE iff v >= T + margin, X otherwise (so a value exactly at T with zero
/// margin reads as ZERO).
struct TernaryWord {
  std::vector<Ternary> symbols;
  double threshold_t = 0.0;
  double margin = 0.0;
};

TernaryWord ternary_encode(std::span<const double> sweep, double threshold_t,
                           double margin);

/// Mismatch fraction over the cells whose CHALLENGE symbol is solid (0/1);
/// X-challenge cells are excluded from both numerator and denominator.
/// An empty scored set yields 0.
double ternary_crp_error(const TernaryWord& challenge,
                         const TernaryWord& response);

// CSV row forms used by the experiment front end.
std::string word_to_csv(const StateWord& word);           // cell_id,state
std::string error_vector_to_csv(const ErrorVector& ve);   // state_index,error,occupancy

}  // namespace pufsim

#endif
