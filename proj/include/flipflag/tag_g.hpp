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

#ifndef FLIPFLAG_TAG_G_HPP
#define FLIPFLAG_TAG_G_HPP

#include <optional>
#include <string>
#include <variant>

#include "flipflag/wire.hpp"

namespace flipflag {

/**
 * Goods tag state machine.
 *
 * While active it runs the same shopping authentication as a membership tag
 * and stores the signed receipt instead of a pseudonym. After a committed
 * checkout broadcast it goes inactive: from then on it answers queries only
 * with the stored transaction time and a fresh nonce, and accepts exactly
 * one activation value per issued challenge.
 */
class GTag {
 public:
  GTag(std::string name, crypto::SecretKey key, crypto::EncryptedKey enc_key, crypto::Rng rng);

  /// Shopping step 2; refuses while inactive.
  Outcome<wire::AuthResponse> auth_response(const crypto::Nonce& gamma1);

  /// Shopping step 4 (goods branch): commits token, key chain step and the
  /// signed receipt atomically.
  Status apply_provision(const wire::Provision& p);

  /// Checkout step 6. A broadcast reaching an already-inactive tag is a
  /// silent no-op; a failed check leaves the tag active and unchanged.
  Status deactivate(const wire::DeactivateBroadcast& b);

  /// After-sales step 2: the only thing an inactive tag ever says.
  Outcome<wire::InactiveReply> inactive_reply();

  /// After-sales step 6: activate iff the response matches the stored
  /// deactivate/activate key under the latest issued challenge. Rejection
  /// emits nothing and keeps the challenge, so one challenge admits exactly
  /// one activation value.
  Outcome<wire::GTagProof> try_activate(const wire::ActivateChallenge& c);

  const std::string& name() const { return name_; }
  bool active() const { return active_; }
  const crypto::SecretKey& key() const { return key_; }
  const crypto::EncryptedKey& encrypted_key() const { return enc_key_; }
  const std::optional<wire::ShoppingToken>& session_token() const { return session_w_; }
  const std::optional<wire::Receipt>& receipt() const { return receipt_; }
  const std::optional<crypto::SecretKey>& activation_key() const { return k_cg_; }
  const std::optional<wire::TxTime>& tx_time() const { return d_j_; }

  /// Committed state only; flight bookkeeping and RNG position excluded.
  Bytes fingerprint() const;

 private:
  struct ShoppingFlight {
    crypto::Nonce gamma2{};
  };
  struct InactiveFlight {
    crypto::Nonce gamma1{};
  };

  std::string name_;
  crypto::SecretKey key_;
  crypto::EncryptedKey enc_key_;
  bool active_ = true;
  std::optional<wire::ShoppingToken> session_w_;
  std::optional<wire::Receipt> receipt_;
  std::optional<crypto::SecretKey> k_cg_;
  std::optional<wire::TxTime> d_j_;
  std::variant<std::monostate, ShoppingFlight, InactiveFlight> flight_;
  crypto::Rng rng_;
};

}  // namespace flipflag

#endif  // FLIPFLAG_TAG_G_HPP
