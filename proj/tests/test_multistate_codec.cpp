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

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "core/multistate_codec.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace pufsim;

namespace {

// Brute-force reimplementation of the per-state average error, kept
// deliberately naive (one pass per state) and independent of the library's
// single-pass grouping.
ErrorVector error_vector_oracle(const StateWord& challenge,
                                const StateWord& response) {
  ErrorVector ve;
  ve.errors.resize(challenge.n_states, 0.0);
  ve.occupancies.resize(challenge.n_states, 0);
  for (std::uint16_t state = 0; state < challenge.n_states; ++state) {
    std::uint64_t sum = 0;
    std::uint32_t count = 0;
    for (std::size_t k = 0; k < challenge.states.size(); ++k) {
      if (challenge.states[k] != state) continue;
      sum += static_cast<std::uint64_t>(
          std::abs(static_cast<int>(response.states[k]) -
                   static_cast<int>(challenge.states[k])));
      ++count;
    }
    ve.occupancies[state] = count;
    if (count > 0) ve.errors[state] = static_cast<double>(sum) / count;
  }
  return ve;
}

StateWord random_word(rng::Stream& stream, std::size_t length,
                      std::uint16_t n_states) {
  StateWord word;
  word.n_states = n_states;
  word.states.reserve(length);
  for (std::size_t i = 0; i < length; ++i)
    word.states.push_back(
        static_cast<std::uint16_t>(stream.next_below(n_states)));
  return word;
}

std::vector<double> gaussian_sweep(std::uint64_t seed, std::size_t n,
                                   double mu, double sigma) {
  std::vector<double> sweep(n);
  for (std::size_t i = 0; i < n; ++i)
    sweep[i] = rng::Stream(rng::derive(seed, i)).next_normal(mu, sigma);
  return sweep;
}

}  // namespace

TEST_CASE("median split of a four-point sweep balances occupancies") {
  const std::vector<double> sweep{1, 2, 3, 4};
  const StateQuantizer q = calibrate_quantizer(sweep, 2);
  REQUIRE(q.boundaries.size() == 1);
  CHECK(q.boundaries[0] > 2.0);
  CHECK(q.boundaries[0] <= 3.0);
  const StateWord word = encode(sweep, q);
  CHECK(word.states == std::vector<std::uint16_t>{0, 0, 1, 1});
}

TEST_CASE("eight distinct values and eight states give occupancy one each") {
  const std::vector<double> sweep{2.9, 1.2, 2.3, 1.7, 3.4, 2.0, 1.4, 2.6};
  const StateQuantizer q = calibrate_quantizer(sweep, 8);
  const ErrorVector ve = error_vector(encode(sweep, q), encode(sweep, q));
  for (std::uint32_t n : ve.occupancies) CHECK(n == 1);
}

TEST_CASE("calibration on a large gaussian sweep is near-uniform") {
  const auto sweep = gaussian_sweep(404, 10000, 2.1, 0.54);
  const StateQuantizer q = calibrate_quantizer(sweep, 8);
  const StateWord word = encode(sweep, q);
  std::vector<std::uint32_t> counts(8, 0);
  for (auto s : word.states) counts[s]++;
  for (std::uint32_t n : counts) {
    CHECK(n >= 1150);
    CHECK(n <= 1350);
  }
}

TEST_CASE("quantile balance on the calibration sweep is within one cell") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    for (std::uint16_t n_states : {2, 3, 5, 8}) {
      for (std::size_t n : {16ul, 101ul, 1000ul}) {
        const auto sweep = gaussian_sweep(seed * 100 + n_states, n, 2.1, 0.54);
        const StateWord word = encode(sweep, calibrate_quantizer(sweep, n_states));
        std::vector<std::uint32_t> counts(n_states, 0);
        for (auto s : word.states) counts[s]++;
        const double ideal = static_cast<double>(n) / n_states;
        for (std::uint32_t c : counts)
          CHECK(std::abs(static_cast<double>(c) - ideal) <= 1.0);
      }
    }
  }
}

TEST_CASE("calibration rejects bad inputs") {
  std::vector<double> sweep{1, 2, 3, 4};
  CHECK_THROWS_AS(calibrate_quantizer(sweep, 1), Error);
  CHECK_THROWS_AS(calibrate_quantizer(std::vector<double>{1.0}, 2), Error);
  // all-equal sweep cannot produce strictly increasing boundaries
  CHECK_THROWS_AS(calibrate_quantizer(std::vector<double>{2, 2, 2, 2}, 2),
                  Error);
}

TEST_CASE("extreme values land in the edge states") {
  const auto sweep = gaussian_sweep(7, 1000, 2.1, 0.54);
  const StateQuantizer q = calibrate_quantizer(sweep, 8);
  CHECK(encode_value(-1e3, q) == 0);
  CHECK(encode_value(+1e3, q) == 7);
  // a value exactly on a boundary goes to the lower state
  CHECK(encode_value(q.boundaries[3], q) == 3);
}

TEST_CASE("error vector follows the per-state average definition") {
  StateWord challenge{{3, 3, 3}, 8};
  StateWord response{{3, 4, 1}, 8};
  const ErrorVector ve = error_vector(challenge, response);
  CHECK(ve.errors[3] == doctest::Approx(1.0));
  CHECK(ve.occupancies[3] == 3);
  for (std::uint16_t i = 0; i < 8; ++i) {
    if (i == 3) continue;
    CHECK(ve.errors[i] == 0.0);
    CHECK(ve.occupancies[i] == 0);
  }
}

TEST_CASE("identical response gives the all-zero error vector") {
  rng::Stream stream(rng::derive(31));
  const StateWord word = random_word(stream, 64, 8);
  const ErrorVector ve = error_vector(word, word);
  for (double e : ve.errors) CHECK(e == 0.0);
}

TEST_CASE("two-state swap yields unit error in both states") {
  StateWord challenge{{0, 1}, 2};
  StateWord response{{1, 0}, 2};
  const ErrorVector ve = error_vector(challenge, response);
  CHECK(ve.errors[0] == 1.0);
  CHECK(ve.errors[1] == 1.0);
}

TEST_CASE("error vector rejects mismatched shapes") {
  StateWord a{{0, 1}, 2};
  StateWord b{{0, 1, 1}, 2};
  CHECK_THROWS_AS(error_vector(a, b), Error);
  StateWord c{{0, 1}, 4};
  CHECK_THROWS_AS(error_vector(a, c), Error);
}

TEST_CASE("error vector matches the brute-force oracle exactly") {
  rng::Stream stream(rng::derive(2024));
  for (int trial = 0; trial < 2000; ++trial) {
    const std::uint16_t n_states = trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 4 : 8);
    const std::size_t length = 1 + stream.next_below(256);
    const StateWord challenge = random_word(stream, length, n_states);
    const StateWord response = random_word(stream, length, n_states);
    const ErrorVector got = error_vector(challenge, response);
    const ErrorVector want = error_vector_oracle(challenge, response);
    REQUIRE(got.errors == want.errors);  // exact: integer sums, one division
    REQUIRE(got.occupancies == want.occupancies);
  }
}

TEST_CASE("occupancies always sum to the word length") {
  rng::Stream stream(rng::derive(99));
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t length = 1 + stream.next_below(300);
    const StateWord challenge = random_word(stream, length, 8);
    const StateWord response = random_word(stream, length, 8);
    const ErrorVector ve = error_vector(challenge, response);
    std::uint64_t total = 0;
    for (auto n : ve.occupancies) total += n;
    CHECK(total == length);
  }
}

TEST_CASE("ternary classification honors the margin band") {
  const std::vector<double> sweep{1.5, 2.15, 2.5};
  const TernaryWord word = ternary_encode(sweep, 2.1, 0.2);
  CHECK(word.symbols[0] == Ternary::Zero);
  CHECK(word.symbols[1] == Ternary::X);
  CHECK(word.symbols[2] == Ternary::One);
}

TEST_CASE("value at the threshold with zero margin reads as zero") {
  const TernaryWord word = ternary_encode(std::vector<double>{2.1}, 2.1, 0.0);
  CHECK(word.symbols[0] == Ternary::Zero);
}

TEST_CASE("negative margin is rejected") {
  CHECK_THROWS_AS(ternary_encode(std::vector<double>{1.0}, 2.1, -0.1), Error);
}

TEST_CASE("ternary error scores only solid challenge cells") {
  TernaryWord challenge;
  challenge.symbols = {Ternary::Zero, Ternary::One, Ternary::X};
  TernaryWord response;
  response.symbols = {Ternary::Zero, Ternary::Zero, Ternary::One};
  CHECK(ternary_crp_error(challenge, response) == doctest::Approx(0.5));
}

TEST_CASE("an X response against a solid challenge counts as a mismatch") {
  TernaryWord challenge;
  challenge.symbols = {Ternary::Zero, Ternary::One};
  TernaryWord response;
  response.symbols = {Ternary::X, Ternary::One};
  CHECK(ternary_crp_error(challenge, response) == doctest::Approx(0.5));
}

TEST_CASE("all-X challenge scores zero") {
  TernaryWord challenge;
  challenge.symbols = {Ternary::X, Ternary::X};
  TernaryWord response;
  response.symbols = {Ternary::Zero, Ternary::One};
  CHECK(ternary_crp_error(challenge, response) == 0.0);
}

TEST_CASE("identical solid words score zero; length mismatch throws") {
  TernaryWord a;
  a.symbols = {Ternary::Zero, Ternary::One};
  CHECK(ternary_crp_error(a, a) == 0.0);
  TernaryWord b;
  b.symbols = {Ternary::Zero};
  CHECK_THROWS_AS(ternary_crp_error(a, b), Error);
}

// Enrollment marks near-threshold cells X with the given margin; responses
// are read back binary (zero margin). Widening the margin blanks exactly the
// cells whose responses wander across the threshold.
TEST_CASE("mean ternary error is non-increasing in the margin") {
  const double margins[] = {0.0, 0.1, 0.2, 0.3};
  double sums[4] = {0, 0, 0, 0};
  const int trials = 1000;
  const std::size_t cells = 64;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> enrolled(cells), fresh(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      rng::Stream cell(rng::derive(rng::tag::kTernary, t, i));
      enrolled[i] = cell.next_normal(2.1, 0.54);
      fresh[i] = enrolled[i] + cell.next_normal(0.0, 0.08);
    }
    std::vector<double> sorted(enrolled);
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[cells / 2 - 1] + sorted[cells / 2]);
    const TernaryWord response = ternary_encode(fresh, median, 0.0);
    for (int m = 0; m < 4; ++m) {
      sums[m] += ternary_crp_error(ternary_encode(enrolled, median, margins[m]),
                                   response);
    }
  }
  CHECK(sums[0] > 0.0);
  for (int m = 1; m < 4; ++m) CHECK(sums[m] <= sums[m - 1]);
}

// The quantizer is enrolled at the base distribution; shifting every
// response in one direction piles errors onto the states on the opposite
// side of the word. Positive and negative shifts of equal size mirror each
// other state-for-state.
TEST_CASE("positive and negative drifts load opposite halves of the VE") {
  const std::size_t n = 20000;
  const auto mu = gaussian_sweep(515, n, 2.1, 0.54);
  const StateQuantizer q = calibrate_quantizer(mu, 8);
  const StateWord challenge = encode(mu, q);

  auto shifted_ve = [&](double shift) {
    std::vector<double> response(mu);
    for (auto& v : response) v += shift;
    return error_vector(challenge, encode(response, q));
  };

  for (double delta : {0.15, 0.3}) {
    const ErrorVector up = shifted_ve(+delta);
    const ErrorVector down = shifted_ve(-delta);
    for (std::uint16_t i = 0; i < 4; ++i) {
      CHECK(up.errors[i] > down.errors[i]);      // low states: worse under +
      CHECK(up.errors[7 - i] < down.errors[7 - i]);  // high states: mirrored
    }
    // the far-side extreme state saturates and cannot err outward
    CHECK(up.errors[7] == 0.0);
    CHECK(down.errors[0] == 0.0);
  }
}

TEST_CASE("word and error vector serialize to the documented csv rows") {
  StateWord word{{2, 0}, 4};
  CHECK(word_to_csv(word) == "cell_id,state\n0,2\n1,0\n");
  ErrorVector ve;
  ve.errors = {0.5, 0.0};
  ve.occupancies = {2, 0};
  CHECK(error_vector_to_csv(ve) ==
        "state_index,error,occupancy\n0,0.5,2\n1,0,0\n");
}
