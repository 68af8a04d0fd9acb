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

#include "flipflag/tag_g.hpp"

#include <cstring>

namespace flipflag {

using crypto::hash_fields;

GTag::GTag(std::string name, crypto::SecretKey key, crypto::EncryptedKey enc_key,
           crypto::Rng rng)
    : name_(std::move(name)), key_(key), enc_key_(enc_key), rng_(rng) {}

Outcome<wire::AuthResponse> GTag::auth_response(const crypto::Nonce& gamma1) {
  if (!active_) return ProtoError::Inactive;
  wire::AuthResponse out;
  out.t = enc_key_;
  out.v = hash_fields({key_, gamma1});
  out.gamma2 = rng_.nonce();
  flight_ = ShoppingFlight{out.gamma2};
  return out;
}

Status GTag::apply_provision(const wire::Provision& p) {
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

  if (p.alpha2.size() != wire::kReceiptLen) return ProtoError::IntegrityFailure;
  Bytes r_plain = crypto::apply_mask(w, gamma2, p.alpha2);
  if (!crypto::integrity_ok(p.beta2, hash_fields({r_plain, gamma2}))) {
    return ProtoError::IntegrityFailure;
  }
  auto receipt = wire::Receipt::parse(r_plain);
  if (!receipt.ok()) return ProtoError::IntegrityFailure;

  key_ = k_new;
  enc_key_ = t_new;
  session_w_ = w;
  receipt_ = receipt.value();
  flight_ = std::monostate{};
  return ok_status();
}

Status GTag::deactivate(const wire::DeactivateBroadcast& b) {
  if (!active_) return ok_status();  // carts broadcast to everything in range
  if (!session_w_) return ProtoError::IntegrityFailure;

  std::array<std::uint8_t, wire::kTokenLen> plain{};
  for (std::size_t i = 0; i < plain.size(); ++i) plain[i] = b.delta[i] ^ (*session_w_)[i];
  auto kd = wire::unpack_kcg_dj(plain);
  if (!kd.ok()) return ProtoError::IntegrityFailure;
  const auto d_bytes = kd.value().d_j.bytes();
  if (!crypto::integrity_ok(b.nu, hash_fields({kd.value().k_cg, d_bytes, b.gamma2}))) {
    return ProtoError::IntegrityFailure;
  }

  k_cg_ = kd.value().k_cg;
  d_j_ = kd.value().d_j;
  active_ = false;
  return ok_status();
}

Outcome<wire::InactiveReply> GTag::inactive_reply() {
  if (active_) return ProtoError::ActiveTag;
  wire::InactiveReply out;
  out.d_j = *d_j_;
  out.gamma1 = rng_.nonce();
  // Only the latest challenge counts; issuing a new one invalidates any
  // previous activation attempt.
  flight_ = InactiveFlight{out.gamma1};
  return out;
}

Outcome<wire::GTagProof> GTag::try_activate(const wire::ActivateChallenge& c) {
  if (active_) return ProtoError::ActiveTag;
  const auto* flight = std::get_if<InactiveFlight>(&flight_);
  if (flight == nullptr || !k_cg_) return ProtoError::Rejected;
  const crypto::Nonce gamma1 = flight->gamma1;

  if (c.delta != hash_fields({*k_cg_, gamma1})) return ProtoError::Rejected;

  active_ = true;
  flight_ = std::monostate{};
  wire::GTagProof out;
  out.t_g = enc_key_;
  out.v2 = hash_fields({key_, gamma1});
  out.receipt = *receipt_;
  return out;
}

Bytes GTag::fingerprint() const {
  Bytes out = concat({key_, enc_key_});
  out.push_back(active_ ? 1 : 0);
  out.push_back(session_w_ ? 1 : 0);
  if (session_w_) out.insert(out.end(), session_w_->begin(), session_w_->end());
  out.push_back(receipt_ ? 1 : 0);
  if (receipt_) {
    auto r = receipt_->bytes();
    out.insert(out.end(), r.begin(), r.end());
  }
  out.push_back(k_cg_ ? 1 : 0);
  if (k_cg_) out.insert(out.end(), k_cg_->begin(), k_cg_->end());
  out.push_back(d_j_ ? 1 : 0);
  if (d_j_) {
    auto d = d_j_->bytes();
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

}  // namespace flipflag
