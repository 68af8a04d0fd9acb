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

#include "flipflag/wire.hpp"

#include <cassert>
#include <cstring>

namespace flipflag::wire {

namespace {

// Total encoded lengths per kind, including the kind byte. Provision has
// two valid forms (masked pseudonym vs masked receipt).
constexpr std::size_t kLenChallenge = 1 + crypto::kNonceLen;                            // 17
constexpr std::size_t kLenAuthResponse =
    1 + crypto::kSealedKeyLen + crypto::kHashLen + crypto::kNonceLen;                   // 129
constexpr std::size_t kLenProvisionM =
    1 + kWktLen + crypto::kHashLen + kPseudonymLen + crypto::kHashLen;                  // 233
constexpr std::size_t kLenProvisionG =
    1 + kWktLen + crypto::kHashLen + kReceiptLen + crypto::kHashLen;                    // 313
constexpr std::size_t kLenCheckoutHello = 1 + kPseudonymLen + crypto::kNonceLen;        // 33
constexpr std::size_t kLenTimeIssue =
    1 + kTxTimeLen + crypto::kHashLen + crypto::kNonceLen;                              // 57
constexpr std::size_t kLenKcgWrapped = 1 + kDeltaNuLen + crypto::kHashLen;              // 105
constexpr std::size_t kLenDeactivateBroadcast =
    1 + kTokenLen + crypto::kHashLen + crypto::kNonceLen;                               // 89
constexpr std::size_t kLenInactiveReply = 1 + kTxTimeLen + crypto::kNonceLen;           // 25
constexpr std::size_t kLenAftersalesMTag =
    1 + crypto::kSealedKeyLen + 3 * crypto::kHashLen + crypto::kNonceLen;               // 193
constexpr std::size_t kLenActivateChallenge = 1 + crypto::kHashLen;                     // 33
constexpr std::size_t kLenGTagProof = 1 + crypto::kSealedKeyLen + crypto::kHashLen + kReceiptLen;
constexpr std::size_t kLenKeyUpdateAck =
    1 + crypto::kKeyLen + crypto::kSealedKeyLen + crypto::kHashLen;                     // 145

class Writer {
 public:
  explicit Writer(std::size_t total) { buf_.reserve(total); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void raw(ByteView v) { buf_.insert(buf_.end(), v.begin(), v.end()); }

  Bytes take() && { return std::move(buf_); }

 private:
  Bytes buf_;
};

class Cursor {
 public:
  explicit Cursor(ByteView in) : in_(in) {}

  template <std::size_t N>
  void take(std::array<std::uint8_t, N>& out) {
    std::memcpy(out.data(), in_.data() + pos_, N);
    pos_ += N;
  }

  ByteView take(std::size_t n) {
    ByteView out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  ByteView in_;
  std::size_t pos_ = 1;  // skip the kind byte
};

}  // namespace

std::array<std::uint8_t, kTxTimeLen> TxTime::bytes() const {
  std::array<std::uint8_t, kTxTimeLen> out{};
  store_be64(out.data(), seconds);
  return out;
}

TxTime TxTime::from_bytes(const std::uint8_t* in) { return TxTime{load_be64(in)}; }

std::array<std::uint8_t, kReceiptBodyLen> Receipt::body() const {
  std::array<std::uint8_t, kReceiptBodyLen> out{};
  store_be64(out.data(), shop_serial);
  store_be64(out.data() + 8, price);
  store_be64(out.data() + 16, tx_time.seconds);
  store_be64(out.data() + 24, discount);
  return out;
}

std::array<std::uint8_t, kReceiptLen> Receipt::bytes() const {
  std::array<std::uint8_t, kReceiptLen> out{};
  auto b = body();
  std::memcpy(out.data(), b.data(), b.size());
  std::memcpy(out.data() + kReceiptBodyLen, signature.data(), signature.size());
  return out;
}

Outcome<Receipt> Receipt::parse(ByteView in) {
  if (in.size() != kReceiptLen) return ProtoError::MalformedMessage;
  Receipt r;
  r.shop_serial = load_be64(in.data());
  r.price = load_be64(in.data() + 8);
  r.tx_time = TxTime::from_bytes(in.data() + 16);
  r.discount = load_be64(in.data() + 24);
  std::memcpy(r.signature.data(), in.data() + kReceiptBodyLen, crypto::kSigLen);
  return r;
}

std::uint8_t kind_of(const ProtocolMessage& m) {
  return static_cast<std::uint8_t>(m.index() + 1);
}

std::string_view kind_name(std::uint8_t kind) {
  switch (kind) {
    case kKindChallenge: return "challenge";
    case kKindAuthResponse: return "auth_response";
    case kKindProvision: return "provision";
    case kKindCheckoutHello: return "checkout_hello";
    case kKindTimeIssue: return "time_issue";
    case kKindKcgWrapped: return "kcg_wrapped";
    case kKindDeactivateBroadcast: return "deactivate_broadcast";
    case kKindInactiveReply: return "inactive_reply";
    case kKindAftersalesMTag: return "aftersales_mtag";
    case kKindActivateChallenge: return "activate_challenge";
    case kKindGTagProof: return "gtag_proof";
    case kKindKeyUpdateAck: return "key_update_ack";
    default: return "unknown";
  }
}

std::optional<std::uint8_t> kind_from_name(std::string_view name) {
  for (std::uint8_t k = 1; k <= kKindCount; ++k) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::uint8_t peek_kind(ByteView bytes) { return bytes.empty() ? 0 : bytes[0]; }

Bytes encode(const ProtocolMessage& m) {
  const std::uint8_t kind = kind_of(m);
  return std::visit(
      [kind](const auto& v) -> Bytes {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Challenge>) {
          Writer w(kLenChallenge);
          w.u8(kind);
          w.raw(v.gamma1);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, AuthResponse>) {
          Writer w(kLenAuthResponse);
          w.u8(kind);
          w.raw(v.t);
          w.raw(v.v);
          w.raw(v.gamma2);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, Provision>) {
          assert(v.alpha2.size() == kPseudonymLen || v.alpha2.size() == kReceiptLen);
          Writer w(v.alpha2.size() == kPseudonymLen ? kLenProvisionM : kLenProvisionG);
          w.u8(kind);
          w.raw(v.alpha1);
          w.raw(v.beta1);
          w.raw(v.alpha2);
          w.raw(v.beta2);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, CheckoutHello>) {
          Writer w(kLenCheckoutHello);
          w.u8(kind);
          w.raw(v.n_i);
          w.raw(v.gamma1);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, TimeIssue>) {
          Writer w(kLenTimeIssue);
          w.u8(kind);
          w.raw(v.alpha1);
          w.raw(v.beta1);
          w.raw(v.gamma2);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, KcgWrapped>) {
          Writer w(kLenKcgWrapped);
          w.u8(kind);
          w.raw(v.alpha2);
          w.raw(v.beta2);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, DeactivateBroadcast>) {
          Writer w(kLenDeactivateBroadcast);
          w.u8(kind);
          w.raw(v.delta);
          w.raw(v.nu);
          w.raw(v.gamma2);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, InactiveReply>) {
          Writer w(kLenInactiveReply);
          w.u8(kind);
          w.raw(v.d_j.bytes());
          w.raw(v.gamma1);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, AftersalesMTag>) {
          Writer w(kLenAftersalesMTag);
          w.u8(kind);
          w.raw(v.t_ci);
          w.raw(v.v1);
          w.raw(v.alpha1);
          w.raw(v.beta1);
          w.raw(v.gamma2);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, ActivateChallenge>) {
          Writer w(kLenActivateChallenge);
          w.u8(kind);
          w.raw(v.delta);
          return std::move(w).take();
        } else if constexpr (std::is_same_v<T, GTagProof>) {
          Writer w(kLenGTagProof);
          w.u8(kind);
          w.raw(v.t_g);
          w.raw(v.v2);
          w.raw(v.receipt.bytes());
          return std::move(w).take();
        } else {
          static_assert(std::is_same_v<T, KeyUpdateAck>);
          Writer w(kLenKeyUpdateAck);
          w.u8(kind);
          w.raw(v.alpha2);
          w.raw(v.beta2);
          return std::move(w).take();
        }
      },
      m);
}

Outcome<ProtocolMessage> decode(ByteView bytes) {
  if (bytes.empty()) return ProtoError::MalformedMessage;
  const std::uint8_t kind = bytes[0];
  const std::size_t len = bytes.size();
  Cursor c(bytes);

  switch (kind) {
    case kKindChallenge: {
      if (len != kLenChallenge) return ProtoError::MalformedMessage;
      Challenge m;
      c.take(m.gamma1);
      return ProtocolMessage(m);
    }
    case kKindAuthResponse: {
      if (len != kLenAuthResponse) return ProtoError::MalformedMessage;
      AuthResponse m;
      c.take(m.t);
      c.take(m.v);
      c.take(m.gamma2);
      return ProtocolMessage(m);
    }
    case kKindProvision: {
      if (len != kLenProvisionM && len != kLenProvisionG) return ProtoError::MalformedMessage;
      Provision m;
      c.take(m.alpha1);
      c.take(m.beta1);
      ByteView a2 = c.take(len == kLenProvisionM ? kPseudonymLen : kReceiptLen);
      m.alpha2.assign(a2.begin(), a2.end());
      c.take(m.beta2);
      return ProtocolMessage(std::move(m));
    }
    case kKindCheckoutHello: {
      if (len != kLenCheckoutHello) return ProtoError::MalformedMessage;
      CheckoutHello m;
      c.take(m.n_i);
      c.take(m.gamma1);
      return ProtocolMessage(m);
    }
    case kKindTimeIssue: {
      if (len != kLenTimeIssue) return ProtoError::MalformedMessage;
      TimeIssue m;
      c.take(m.alpha1);
      c.take(m.beta1);
      c.take(m.gamma2);
      return ProtocolMessage(m);
    }
    case kKindKcgWrapped: {
      if (len != kLenKcgWrapped) return ProtoError::MalformedMessage;
      KcgWrapped m;
      c.take(m.alpha2);
      c.take(m.beta2);
      return ProtocolMessage(m);
    }
    case kKindDeactivateBroadcast: {
      if (len != kLenDeactivateBroadcast) return ProtoError::MalformedMessage;
      DeactivateBroadcast m;
      c.take(m.delta);
      c.take(m.nu);
      c.take(m.gamma2);
      return ProtocolMessage(m);
    }
    case kKindInactiveReply: {
      if (len != kLenInactiveReply) return ProtoError::MalformedMessage;
      InactiveReply m;
      m.d_j = TxTime::from_bytes(c.take(kTxTimeLen).data());
      c.take(m.gamma1);
      return ProtocolMessage(m);
    }
    case kKindAftersalesMTag: {
      if (len != kLenAftersalesMTag) return ProtoError::MalformedMessage;
      AftersalesMTag m;
      c.take(m.t_ci);
      c.take(m.v1);
      c.take(m.alpha1);
      c.take(m.beta1);
      c.take(m.gamma2);
      return ProtocolMessage(m);
    }
    case kKindActivateChallenge: {
      if (len != kLenActivateChallenge) return ProtoError::MalformedMessage;
      ActivateChallenge m;
      c.take(m.delta);
      return ProtocolMessage(m);
    }
    case kKindGTagProof: {
      if (len != kLenGTagProof) return ProtoError::MalformedMessage;
      GTagProof m;
      c.take(m.t_g);
      c.take(m.v2);
      auto r = Receipt::parse(c.take(kReceiptLen));
      if (!r.ok()) return r.error();
      m.receipt = r.value();
      return ProtocolMessage(m);
    }
    case kKindKeyUpdateAck: {
      if (len != kLenKeyUpdateAck) return ProtoError::MalformedMessage;
      KeyUpdateAck m;
      c.take(m.alpha2);
      c.take(m.beta2);
      return ProtocolMessage(m);
    }
    default:
      return ProtoError::MalformedMessage;
  }
}

std::array<std::uint8_t, kWktLen> pack_wkt(const ShoppingToken& w, const crypto::SecretKey& k,
                                           const crypto::EncryptedKey& t) {
  std::array<std::uint8_t, kWktLen> out{};
  std::memcpy(out.data(), w.data(), w.size());
  std::memcpy(out.data() + kTokenLen, k.data(), k.size());
  std::memcpy(out.data() + kTokenLen + crypto::kKeyLen, t.data(), t.size());
  return out;
}

Outcome<Wkt> unpack_wkt(ByteView in) {
  if (in.size() != kWktLen) return ProtoError::MalformedMessage;
  Wkt out;
  std::memcpy(out.w.data(), in.data(), kTokenLen);
  std::memcpy(out.k.data(), in.data() + kTokenLen, crypto::kKeyLen);
  std::memcpy(out.t.data(), in.data() + kTokenLen + crypto::kKeyLen, crypto::kSealedKeyLen);
  return out;
}

std::array<std::uint8_t, kTokenLen> pack_kcg_dj(const crypto::SecretKey& k_cg, TxTime d_j) {
  std::array<std::uint8_t, kTokenLen> out{};
  std::memcpy(out.data(), k_cg.data(), k_cg.size());
  auto d = d_j.bytes();
  std::memcpy(out.data() + kKcgLen, d.data(), d.size());
  return out;
}

Outcome<KcgDj> unpack_kcg_dj(ByteView in) {
  if (in.size() != kTokenLen) return ProtoError::MalformedMessage;
  KcgDj out;
  std::memcpy(out.k_cg.data(), in.data(), kKcgLen);
  out.d_j = TxTime::from_bytes(in.data() + kKcgLen);
  return out;
}

}  // namespace flipflag::wire
