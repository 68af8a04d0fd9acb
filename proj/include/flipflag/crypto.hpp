/*
 * Copyright 2026 The flipflag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FLIPFLAG_CRYPTO_HPP
#define FLIPFLAG_CRYPTO_HPP

#include <cstdint>
#include <string_view>

#include "flipflag/bytes.hpp"

namespace flipflag::crypto {

inline constexpr std::size_t kHashLen = 32;
inline constexpr std::size_t kKeyLen = 32;
inline constexpr std::size_t kNonceLen = 16;
inline constexpr std::size_t kSeedLen = 32;

// Sealed-box layout: 32-byte ephemeral public key, 16-byte MAC, 32-byte
// encrypted key. Fixed for every encrypted tag key on the wire.
inline constexpr std::size_t kSealedKeyLen = 80;
inline constexpr std::size_t kSigLen = 64;

using Digest = std::array<std::uint8_t, kHashLen>;
using SecretKey = std::array<std::uint8_t, kKeyLen>;
using EncryptedKey = std::array<std::uint8_t, kSealedKeyLen>;
using Nonce = std::array<std::uint8_t, kNonceLen>;
using Seed = std::array<std::uint8_t, kSeedLen>;
using Signature = std::array<std::uint8_t, kSigLen>;

/// Deterministic byte stream keyed by a 32-byte seed. Each call consumes
/// whole hash blocks, so successive outputs never overlap and a fixed seed
/// replays the exact same stream.
class Rng {
 public:
  explicit Rng(const Seed& seed) : key_(seed) {}

  void fill(std::span<std::uint8_t> out);
  Bytes next(std::size_t n);
  Nonce nonce();
  Seed seed();

  /// Derives an independent child stream; label-based, so fork order does
  /// not matter.
  Rng fork(std::string_view label) const;

 private:
  Seed key_;
  std::uint64_t counter_ = 0;
};

/// Domain-separated hash of an ordered field list: each field is prefixed
/// with its 4-byte big-endian length before hashing, so moving bytes across
/// a field boundary always changes the digest.
Digest hash_fields(std::initializer_list<ByteView> fields);

/// Counter-mode mask expansion: first n bytes of B_0 || B_1 || ... with
/// B_i = hash_fields([secret, nonce, be32(i)]). Prefix-consistent in n.
Bytes mex(ByteView secret, const Nonce& nonce, std::size_t n);

/// XORs data with mex(secret, nonce, len(data)); applying it twice with the
/// same secret and nonce restores the input.
Bytes apply_mask(ByteView secret, const Nonce& nonce, ByteView data);

struct BoxKeyPair {
  std::array<std::uint8_t, 32> pk{};
  std::array<std::uint8_t, 32> sk{};
};

struct SignKeyPair {
  std::array<std::uint8_t, 32> pk{};
  std::array<std::uint8_t, 64> sk{};
};

struct ServerKeyPair {
  BoxKeyPair box;
  SignKeyPair sig;

  static ServerKeyPair generate(Rng& rng);
};

/// Randomized public-key encryption of a tag key. The ephemeral keypair is
/// derived from the caller's RNG so whole scenarios replay bit-exactly.
/// Output length is always kSealedKeyLen.
EncryptedKey pke_encrypt(const std::array<std::uint8_t, 32>& pk, const SecretKey& key, Rng& rng);

/// Fails with DecryptError on any forged or malformed ciphertext.
Outcome<SecretKey> pke_decrypt(const BoxKeyPair& keys, const EncryptedKey& ct);

Signature sign_receipt(const SignKeyPair& keys, ByteView body);
bool verify_receipt(const std::array<std::uint8_t, 32>& sig_pk, ByteView body,
                    const Signature& sig);

/// Test fixture: disables the beta/nu integrity comparisons so the tamper
/// suite's power can be demonstrated. Never enabled in normal operation.
void set_insecure_skip_integrity_checks(bool skip);
bool integrity_checks_enabled();

/// Integrity comparison used for every beta/nu check; honors the fixture
/// switch above.
bool integrity_ok(const Digest& got, const Digest& want);

}  // namespace flipflag::crypto

#endif  // FLIPFLAG_CRYPTO_HPP
