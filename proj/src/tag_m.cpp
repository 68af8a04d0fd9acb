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

#include "flipflag/tag_m.hpp"

#include <cstring>

namespace flipflag {

using crypto::hash_fields;

MTag::MTag(std::string name, crypto::SecretKey key, crypto::EncryptedKey enc_key,
           crypto::Seed activation_seed, crypto::Rng rng)
    : name_(std::move(name)),
      key_(key),
      enc_key_(enc_key),
      seed_(activation_seed),
      rng_(rng) {}

wire::AuthResponse MTag::auth_response(const crypto::Nonce& gamma1) {
  wire::AuthResponse out;
  out.t = enc_key_;
  out.v = hash_fields({key_, gamma1});
  out.gamma2 = rng_.nonce();
  flight_ = ShoppingFlight{out.gamma2};
  return out;
}

Status MTag::apply_provision(const wire::Provision& p) {
  const auto* flight = std::get_if<ShoppingFlight>(&flight_);
  if (flight == nullptr) return ProtoError::IntegrityFailure;
  const crypto::Nonce gamma2 = flight->gamma2;

  Bytes plain = crypto::apply_mask(key_, gamma2, p.alpha1);
  auto wkt = wire::unpack_wkt(plain);
  if (!wkt.ok()) return ProtoError::IntegrityFailure;
  const auto& [w, k_new, t_new] = wkt.value();

  if (!crypto::integrity_ok(p.beta1, hash_fields({w, k_new, t_new, gamma2}))) {
    return ProtoError::IntegrityFailure;
  }

  if (p.alpha2.size() != wire::kPseudonymLen) return ProtoError::IntegrityFailure;
  Bytes n_plain = crypto::apply_mask(w, gamma2, p.alpha2);
  wire::Pseudonym n_i{};
  std::memcpy(n_i.data(), n_plain.data(), n_i.size());
  if (!crypto::integrity_ok(p.beta2, hash_fields({n_i, gamma2}))) {
    return ProtoError::IntegrityFailure;
  }

  key_ = k_new;
  enc_key_ = t_new;
  session_ = Session{w, n_i};
  flight_ = std::monostate{};
  return ok_status();
}

Outcome<wire::CheckoutHello> MTag::checkout_hello() {
  if (!session_) return ProtoError::NoSession;
  wire::CheckoutHello out;
  out.n_i = session_->n_i;
  out.gamma1 = rng_.nonce();
  flight_ = CheckoutFlight{out.gamma1};
  return out;
}

Outcome<wire::KcgWrapped> MTag::checkout_wrap(const wire::TimeIssue& issue) {
  const auto* flight = std::get_if<CheckoutFlight>(&flight_);
  if (flight == nullptr || !session_) return ProtoError::IntegrityFailure;
  const crypto::Nonce gamma1 = flight->gamma1;

  crypto::Digest pad = hash_fields({key_, gamma1});
  std::array<std::uint8_t, wire::kTxTimeLen> d_bytes{};
  for (std::size_t i = 0; i < d_bytes.size(); ++i) d_bytes[i] = issue.alpha1[i] ^ pad[i];
  if (!crypto::integrity_ok(issue.beta1, hash_fields({d_bytes, gamma1}))) {
    return ProtoError::IntegrityFailure;
  }
  const wire::TxTime d_j = wire::TxTime::from_bytes(d_bytes.data());

  // K_cg is derived on the fly and never stored on the tag.
  const crypto::SecretKey k_cg = hash_fields({seed_, d_bytes});
  auto delta = wire::pack_kcg_dj(k_cg, d_j);
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] ^= session_->w[i];
  const crypto::Digest nu = hash_fields({k_cg, d_bytes, issue.gamma2});

  wire::KcgWrapped out;
  Bytes masked =
      crypto::apply_mask(key_, issue.gamma2, concat({ByteView(delta), ByteView(nu)}));
  std::memcpy(out.alpha2.data(), masked.data(), out.alpha2.size());
  out.beta2 = hash_fields({delta, nu, issue.gamma2});

  // Checkout is complete from the tag's point of view once the wrap is
  // emitted; a failed attempt above keeps the session for re-entry.
  session_.reset();
  flight_ = std::monostate{};
  return out;
}

wire::AftersalesMTag MTag::aftersales_respond(const wire::InactiveReply& reply) {
  const auto d_bytes = reply.d_j.bytes();
  const crypto::SecretKey k_cg = hash_fields({seed_, d_bytes});
  const crypto::Digest delta = hash_fields({k_cg, reply.gamma1});

  wire::AftersalesMTag out;
  out.t_ci = enc_key_;
  out.v1 = hash_fields({key_, reply.gamma1});
  Bytes masked = crypto::apply_mask(key_, reply.gamma1, delta);
  std::memcpy(out.alpha1.data(), masked.data(), out.alpha1.size());
  out.beta1 = hash_fields({delta, reply.gamma1});
  out.gamma2 = rng_.nonce();
  flight_ = AftersalesFlight{out.gamma2};
  return out;
}

Status MTag::apply_key_update(const wire::KeyUpdateAck& ack) {
  const auto* flight = std::get_if<AftersalesFlight>(&flight_);
  if (flight == nullptr) return ProtoError::IntegrityFailure;
  const crypto::Nonce gamma2 = flight->gamma2;

  Bytes plain = crypto::apply_mask(key_, gamma2, ack.alpha2);
  crypto::SecretKey k_new{};
  crypto::EncryptedKey t_new{};
  std::memcpy(k_new.data(), plain.data(), k_new.size());
  std::memcpy(t_new.data(), plain.data() + k_new.size(), t_new.size());
  if (!crypto::integrity_ok(ack.beta2, hash_fields({k_new, t_new, gamma2}))) {
    return ProtoError::IntegrityFailure;
  }

  key_ = k_new;
  enc_key_ = t_new;
  flight_ = std::monostate{};
  return ok_status();
}

Bytes MTag::fingerprint() const {
  Bytes out = concat({key_, enc_key_, seed_});
  out.push_back(session_ ? 1 : 0);
  if (session_) {
    out.insert(out.end(), session_->w.begin(), session_->w.end());
    out.insert(out.end(), session_->n_i.begin(), session_->n_i.end());
  }
  return out;
}

}  // namespace flipflag
