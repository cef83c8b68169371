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

#ifndef PUFSIM_CORE_CIPHER_HPP
#define PUFSIM_CORE_CIPHER_HPP

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "core/types.hpp"

namespace pufsim {

struct KeyPair {
  Bytes public_key;
  Bytes private_key;
};

/// Public-key encryption boundary used by the handshake. Round-trip holds
/// for matching pairs; decryption with the wrong key or over a tampered
/// ciphertext fails detectably (nullopt).
class CipherSuite {
 public:
  virtual ~CipherSuite() = default;

  virtual KeyPair keypair_generate(std::uint64_t seed) = 0;
  virtual Bytes encrypt(std::span<const std::uint8_t> public_key,
                        std::span<const std::uint8_t> plaintext) = 0;
  virtual std::optional<Bytes> decrypt(std::span<const std::uint8_t> private_key,
                                       std::span<const std::uint8_t> ciphertext) = 0;
  virtual std::string_view name() const = 0;
};

/// Deterministic keystream-XOR cipher with an 8-byte integrity tag. A test
/// double: same key and plaintext always produce the same ciphertext, which
/// keeps protocol transcripts byte-reproducible under a fixed seed.
class XorKeystreamCipher final : public CipherSuite {
 public:
  KeyPair keypair_generate(std::uint64_t seed) override;
  Bytes encrypt(std::span<const std::uint8_t> public_key,
                std::span<const std::uint8_t> plaintext) override;
  std::optional<Bytes> decrypt(std::span<const std::uint8_t> private_key,
                               std::span<const std::uint8_t> ciphertext) override;
  std::string_view name() const override { return "xor"; }
};

/// libsodium sealed boxes (X25519 + XSalsa20-Poly1305). Keypairs are derived
/// deterministically from the seed; ciphertexts use ephemeral keys, so
/// encryption is randomized.
class SealedBoxCipher final : public CipherSuite {
 public:
  SealedBoxCipher();
  KeyPair keypair_generate(std::uint64_t seed) override;
  Bytes encrypt(std::span<const std::uint8_t> public_key,
                std::span<const std::uint8_t> plaintext) override;
  std::optional<Bytes> decrypt(std::span<const std::uint8_t> private_key,
                               std::span<const std::uint8_t> ciphertext) override;
  std::string_view name() const override { return "sealedbox"; }
};

/// Factory over the suite names accepted in scenario configs.
std::unique_ptr<CipherSuite> make_cipher(const std::string& name);

}  // namespace pufsim

#endif
