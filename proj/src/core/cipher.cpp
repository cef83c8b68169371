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

#include "core/cipher.hpp"

#include <sodium.h>

#include <cstring>

#include "core/rng.hpp"

namespace pufsim {

namespace {

constexpr std::size_t kXorKeyBytes = 32;
constexpr std::size_t kXorTagBytes = 8;

// Private and public halves of the toy pair are byte-flipped images of each
// other; both sides derive the same keystream root.
std::uint64_t xor_key_root(std::span<const std::uint8_t> key_bytes,
                           bool is_private) {
  std::uint64_t h = 0x584F524B45595354ull;
  for (std::uint8_t b : key_bytes) {
    const std::uint8_t canonical = is_private ? static_cast<std::uint8_t>(b ^ 0xA5) : b;
    h = rng::mix(h ^ canonical);
  }
  return h;
}

std::uint64_t xor_tag(std::uint64_t root, std::span<const std::uint8_t> data) {
  std::uint64_t h = rng::mix(root ^ 0x5441474D41434B31ull);
  for (std::uint8_t b : data) h = rng::mix(h + b + 1);
  return h;
}

}  // namespace

KeyPair XorKeystreamCipher::keypair_generate(std::uint64_t seed) {
  KeyPair pair;
  pair.private_key.resize(kXorKeyBytes);
  rng::Stream stream(rng::derive(seed, rng::tag::kKeystream));
  stream.fill(pair.private_key);
  pair.public_key.resize(kXorKeyBytes);
  for (std::size_t i = 0; i < kXorKeyBytes; ++i)
    pair.public_key[i] = pair.private_key[i] ^ 0xA5;
  return pair;
}

Bytes XorKeystreamCipher::encrypt(std::span<const std::uint8_t> public_key,
                                  std::span<const std::uint8_t> plaintext) {
  if (public_key.size() != kXorKeyBytes)
    throw Error(ErrorCode::InvalidArgument, "bad xor public key size");
  const std::uint64_t root = xor_key_root(public_key, false);
  const std::uint64_t tag = xor_tag(root, plaintext);
  Bytes out(kXorTagBytes + plaintext.size());
  for (std::size_t i = 0; i < kXorTagBytes; ++i)
    out[i] = static_cast<std::uint8_t>(tag >> (8 * i));
  rng::Stream keystream(rng::derive(root, plaintext.size(), rng::tag::kKeystream));
  for (std::size_t i = 0; i < plaintext.size(); ++i)
    out[kXorTagBytes + i] =
        plaintext[i] ^ static_cast<std::uint8_t>(keystream.next_u64() >> 56);
  return out;
}

std::optional<Bytes> XorKeystreamCipher::decrypt(
    std::span<const std::uint8_t> private_key,
    std::span<const std::uint8_t> ciphertext) {
  if (private_key.size() != kXorKeyBytes) return std::nullopt;
  if (ciphertext.size() < kXorTagBytes) return std::nullopt;
  const std::uint64_t root = xor_key_root(private_key, true);
  const std::size_t body = ciphertext.size() - kXorTagBytes;
  Bytes plain(body);
  rng::Stream keystream(rng::derive(root, body, rng::tag::kKeystream));
  for (std::size_t i = 0; i < body; ++i)
    plain[i] = ciphertext[kXorTagBytes + i] ^
               static_cast<std::uint8_t>(keystream.next_u64() >> 56);
  std::uint64_t tag = 0;
  for (std::size_t i = 0; i < kXorTagBytes; ++i)
    tag |= static_cast<std::uint64_t>(ciphertext[i]) << (8 * i);
  if (tag != xor_tag(root, plain)) return std::nullopt;
  return plain;
}

SealedBoxCipher::SealedBoxCipher() {
  if (sodium_init() < 0)
    throw Error(ErrorCode::Internal, "libsodium initialization failed");
}

KeyPair SealedBoxCipher::keypair_generate(std::uint64_t seed) {
  std::uint8_t box_seed[crypto_box_SEEDBYTES];
  rng::Stream stream(rng::derive(seed, rng::tag::kKeystream, 1));
  stream.fill(box_seed);
  KeyPair pair;
  pair.public_key.resize(crypto_box_PUBLICKEYBYTES);
  // The private handle carries sk || pk: sealed-box opening needs both.
  pair.private_key.resize(crypto_box_SECRETKEYBYTES + crypto_box_PUBLICKEYBYTES);
  crypto_box_seed_keypair(pair.public_key.data(), pair.private_key.data(),
                          box_seed);
  std::memcpy(pair.private_key.data() + crypto_box_SECRETKEYBYTES,
              pair.public_key.data(), crypto_box_PUBLICKEYBYTES);
  return pair;
}

Bytes SealedBoxCipher::encrypt(std::span<const std::uint8_t> public_key,
                               std::span<const std::uint8_t> plaintext) {
  if (public_key.size() != crypto_box_PUBLICKEYBYTES)
    throw Error(ErrorCode::InvalidArgument, "bad sealed-box public key size");
  Bytes out(plaintext.size() + crypto_box_SEALBYTES);
  crypto_box_seal(out.data(), plaintext.data(), plaintext.size(),
                  public_key.data());
  return out;
}

std::optional<Bytes> SealedBoxCipher::decrypt(
    std::span<const std::uint8_t> private_key,
    std::span<const std::uint8_t> ciphertext) {
  if (private_key.size() !=
      crypto_box_SECRETKEYBYTES + crypto_box_PUBLICKEYBYTES)
    return std::nullopt;
  if (ciphertext.size() < crypto_box_SEALBYTES) return std::nullopt;
  Bytes plain(ciphertext.size() - crypto_box_SEALBYTES);
  const std::uint8_t* sk = private_key.data();
  const std::uint8_t* pk = private_key.data() + crypto_box_SECRETKEYBYTES;
  if (crypto_box_seal_open(plain.data(), ciphertext.data(), ciphertext.size(),
                           pk, sk) != 0)
    return std::nullopt;
  return plain;
}

std::unique_ptr<CipherSuite> make_cipher(const std::string& name) {
  if (name == "xor") return std::make_unique<XorKeystreamCipher>();
  if (name == "sealedbox") return std::make_unique<SealedBoxCipher>();
  throw Error(ErrorCode::ConfigError, "unknown cipher suite: " + name);
}

}  // namespace pufsim
