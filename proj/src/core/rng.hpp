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

#ifndef PUFSIM_CORE_RNG_HPP
#define PUFSIM_CORE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>

namespace pufsim::rng {

// Finalizer from splitmix64. Used both as the generator step and to derive
// independent stream seeds from (seed, salt...) tuples, so that every
// randomized quantity in the library is a pure function of its identifiers.
constexpr std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a = 0,
                               std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix(seed + kGolden);
  h = mix(h ^ (a + kGolden));
  h = mix(h ^ (b + kGolden));
  h = mix(h ^ (c + kGolden));
  return h;
}

// Stream-derivation salts. One tag per purpose keeps draws independent
// across unrelated uses of the same user seed.
namespace tag {
constexpr std::uint64_t kSampleMu = 0x01;
constexpr std::uint64_t kMeasure = 0x02;
constexpr std::uint64_t kEnroll = 0x03;
constexpr std::uint64_t kDeviceKeys = 0x04;
constexpr std::uint64_t kServerKeys = 0x05;
constexpr std::uint64_t kSession = 0x06;
constexpr std::uint64_t kDrop = 0x07;
constexpr std::uint64_t kArray = 0x08;
constexpr std::uint64_t kDriftNoise = 0x09;
constexpr std::uint64_t kSigmaCell = 0x0A;
constexpr std::uint64_t kSigmaNoise = 0x0B;
constexpr std::uint64_t kCalGenuine = 0x0C;
constexpr std::uint64_t kCalImpostor = 0x0D;
constexpr std::uint64_t kAdversary = 0x0E;
constexpr std::uint64_t kTernary = 0x0F;
constexpr std::uint64_t kTrial = 0x10;
constexpr std::uint64_t kKeystream = 0x11;
constexpr std::uint64_t kTamper = 0x12;
}  // namespace tag

/// splitmix64 sequence. Cheap to construct, no shared state; normal draws
/// use Box-Muller on two fresh uniforms so a value never depends on
/// generator-internal caching.
class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform in (0, 1]; never zero, safe under log().
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  double next_normal(double mean = 0.0, double sd = 1.0) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double u1 = next_unit();
    const double u2 = next_unit();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  void fill(std::span<std::uint8_t> out) {
    for (auto& b : out) b = static_cast<std::uint8_t>(next_u64() >> 56);
  }

 private:
  std::uint64_t state_;
};

}  // namespace pufsim::rng

#endif
