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

#ifndef FLIPFLAG_WIRE_HPP
#define FLIPFLAG_WIRE_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "flipflag/crypto.hpp"

namespace flipflag::wire {

// Field widths. The token width is forced by the checkout construction
// delta = w XOR (k_cg || d_j): |w| must equal |k_cg| + |d_j|.
inline constexpr std::size_t kTokenLen = 40;
inline constexpr std::size_t kPseudonymLen = 16;
inline constexpr std::size_t kTxTimeLen = 8;
inline constexpr std::size_t kKcgLen = crypto::kKeyLen;
inline constexpr std::size_t kReceiptBodyLen = 32;
inline constexpr std::size_t kReceiptLen = kReceiptBodyLen + crypto::kSigLen;
inline constexpr std::size_t kWktLen = kTokenLen + crypto::kKeyLen + crypto::kSealedKeyLen;
inline constexpr std::size_t kDeltaNuLen = kTokenLen + crypto::kHashLen;

static_assert(kKcgLen + kTxTimeLen == kTokenLen);

using ShoppingToken = std::array<std::uint8_t, kTokenLen>;
using Pseudonym = std::array<std::uint8_t, kPseudonymLen>;

inline constexpr std::uint64_t kDefaultTimeGranularity = 60;

/// Transaction time: UNIX seconds quantized to a configurable granularity.
struct TxTime {
  std::uint64_t seconds = 0;

  static TxTime quantize(std::uint64_t raw_seconds, std::uint64_t granularity) {
    if (granularity == 0) granularity = 1;
    return TxTime{raw_seconds - raw_seconds % granularity};
  }

  std::array<std::uint8_t, kTxTimeLen> bytes() const;
  static TxTime from_bytes(const std::uint8_t* in);

  auto operator<=>(const TxTime&) const = default;
};

/// Signed purchase proof stored on a goods tag: 32-byte big-endian body
/// (shop serial, price, transaction time, discount) plus a signature over
/// that body.
struct Receipt {
  std::uint64_t shop_serial = 0;
  std::uint64_t price = 0;
  TxTime tx_time;
  std::uint64_t discount = 0;
  crypto::Signature signature{};

  std::array<std::uint8_t, kReceiptBodyLen> body() const;
  std::array<std::uint8_t, kReceiptLen> bytes() const;
  static Outcome<Receipt> parse(ByteView in);

  bool operator==(const Receipt&) const = default;
};

// One struct per protocol arrow. All fields sit at fixed offsets.

struct Challenge {
  crypto::Nonce gamma1{};
  bool operator==(const Challenge&) const = default;
};

struct AuthResponse {
  crypto::EncryptedKey t{};
  crypto::Digest v{};
  crypto::Nonce gamma2{};
  bool operator==(const AuthResponse&) const = default;
};

/// Shopping step 3 payload. alpha2 is the masked pseudonym (16 bytes) for a
/// membership tag or the masked receipt (96 bytes) for a goods tag; the two
/// forms have distinct total lengths on the wire.
struct Provision {
  std::array<std::uint8_t, kWktLen> alpha1{};
  crypto::Digest beta1{};
  Bytes alpha2;
  crypto::Digest beta2{};
  bool operator==(const Provision&) const = default;
};

struct CheckoutHello {
  Pseudonym n_i{};
  crypto::Nonce gamma1{};
  bool operator==(const CheckoutHello&) const = default;
};

struct TimeIssue {
  std::array<std::uint8_t, kTxTimeLen> alpha1{};
  crypto::Digest beta1{};
  crypto::Nonce gamma2{};
  bool operator==(const TimeIssue&) const = default;
};

struct KcgWrapped {
  std::array<std::uint8_t, kDeltaNuLen> alpha2{};
  crypto::Digest beta2{};
  bool operator==(const KcgWrapped&) const = default;
};

struct DeactivateBroadcast {
  std::array<std::uint8_t, kTokenLen> delta{};
  crypto::Digest nu{};
  crypto::Nonce gamma2{};
  bool operator==(const DeactivateBroadcast&) const = default;
};

struct InactiveReply {
  TxTime d_j;
  crypto::Nonce gamma1{};
  bool operator==(const InactiveReply&) const = default;
};

struct AftersalesMTag {
  crypto::EncryptedKey t_ci{};
  crypto::Digest v1{};
  std::array<std::uint8_t, crypto::kHashLen> alpha1{};
  crypto::Digest beta1{};
  crypto::Nonce gamma2{};
  bool operator==(const AftersalesMTag&) const = default;
};

struct ActivateChallenge {
  crypto::Digest delta{};
  bool operator==(const ActivateChallenge&) const = default;
};

struct GTagProof {
  crypto::EncryptedKey t_g{};
  crypto::Digest v2{};
  Receipt receipt;
  bool operator==(const GTagProof&) const = default;
};

struct KeyUpdateAck {
  std::array<std::uint8_t, crypto::kKeyLen + crypto::kSealedKeyLen> alpha2{};
  crypto::Digest beta2{};
  bool operator==(const KeyUpdateAck&) const = default;
};

using ProtocolMessage =
    std::variant<Challenge, AuthResponse, Provision, CheckoutHello, TimeIssue, KcgWrapped,
                 DeactivateBroadcast, InactiveReply, AftersalesMTag, ActivateChallenge,
                 GTagProof, KeyUpdateAck>;

inline constexpr std::uint8_t kKindChallenge = 0x01;
inline constexpr std::uint8_t kKindAuthResponse = 0x02;
inline constexpr std::uint8_t kKindProvision = 0x03;
inline constexpr std::uint8_t kKindCheckoutHello = 0x04;
inline constexpr std::uint8_t kKindTimeIssue = 0x05;
inline constexpr std::uint8_t kKindKcgWrapped = 0x06;
inline constexpr std::uint8_t kKindDeactivateBroadcast = 0x07;
inline constexpr std::uint8_t kKindInactiveReply = 0x08;
inline constexpr std::uint8_t kKindAftersalesMTag = 0x09;
inline constexpr std::uint8_t kKindActivateChallenge = 0x0A;
inline constexpr std::uint8_t kKindGTagProof = 0x0B;
inline constexpr std::uint8_t kKindKeyUpdateAck = 0x0C;
inline constexpr std::uint8_t kKindCount = 12;

std::uint8_t kind_of(const ProtocolMessage& m);
std::string_view kind_name(std::uint8_t kind);
std::optional<std::uint8_t> kind_from_name(std::string_view name);
std::uint8_t peek_kind(ByteView bytes);

Bytes encode(const ProtocolMessage& m);
Outcome<ProtocolMessage> decode(ByteView bytes);

// Composite payloads moved under a single mask.

std::array<std::uint8_t, kWktLen> pack_wkt(const ShoppingToken& w, const crypto::SecretKey& k,
                                           const crypto::EncryptedKey& t);

struct Wkt {
  ShoppingToken w{};
  crypto::SecretKey k{};
  crypto::EncryptedKey t{};
  bool operator==(const Wkt&) const = default;
};
Outcome<Wkt> unpack_wkt(ByteView in);

std::array<std::uint8_t, kTokenLen> pack_kcg_dj(const crypto::SecretKey& k_cg, TxTime d_j);

struct KcgDj {
  crypto::SecretKey k_cg{};
  TxTime d_j;
  bool operator==(const KcgDj&) const = default;
};
Outcome<KcgDj> unpack_kcg_dj(ByteView in);

}  // namespace flipflag::wire

#endif  // FLIPFLAG_WIRE_HPP
