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

#ifndef FLIPFLAG_TAG_M_HPP
#define FLIPFLAG_TAG_M_HPP

#include <optional>
#include <string>
#include <variant>

#include "flipflag/wire.hpp"

namespace flipflag {

/**
 * Membership-card tag state machine.
 *
 * Holds the long-term key pair (k, E_pk(k)) plus the activation seed used to
 * derive per-transaction deactivate/activate keys. Every state mutation is
 * all-or-nothing per received message: a failed integrity check leaves the
 * tag byte-identical. The tag tracks at most one in-flight exchange; starting
 * a new one aborts any stale exchange.
 */
class MTag {
 public:
  struct Session {
    wire::ShoppingToken w{};
    wire::Pseudonym n_i{};
    bool operator==(const Session&) const = default;
  };

  MTag(std::string name, crypto::SecretKey key, crypto::EncryptedKey enc_key,
       crypto::Seed activation_seed, crypto::Rng rng);

  /// Shopping step 2: answer a reader challenge with (T, v, gamma2).
  wire::AuthResponse auth_response(const crypto::Nonce& gamma1);

  /// Shopping step 4: verify and commit the token, key chain step and
  /// pseudonym. IntegrityFailure leaves everything unchanged.
  Status apply_provision(const wire::Provision& p);

  /// Checkout step 2: emit the stored pseudonym with a fresh challenge.
  Outcome<wire::CheckoutHello> checkout_hello();

  /// Checkout step 4: recover the transaction time, derive the
  /// deactivate/activate key and wrap it for the goods tags. The derived key
  /// is intentionally not stored.
  Outcome<wire::KcgWrapped> checkout_wrap(const wire::TimeIssue& issue);

  /// After-sales step 4: re-derive the deactivate/activate key from the
  /// stored seed and the goods tag's transaction time.
  wire::AftersalesMTag aftersales_respond(const wire::InactiveReply& reply);

  /// After-sales step 8: verify and commit the refreshed key pair.
  Status apply_key_update(const wire::KeyUpdateAck& ack);

  const std::string& name() const { return name_; }
  const crypto::SecretKey& key() const { return key_; }
  const crypto::EncryptedKey& encrypted_key() const { return enc_key_; }
  const crypto::Seed& activation_seed() const { return seed_; }
  const std::optional<Session>& session() const { return session_; }

  /// Serialization of the committed state (keys, seed, session); flight
  /// bookkeeping and RNG position excluded.
  Bytes fingerprint() const;

 private:
  struct ShoppingFlight {
    crypto::Nonce gamma2{};
  };
  struct CheckoutFlight {
    crypto::Nonce gamma1{};
  };
  struct AftersalesFlight {
    crypto::Nonce gamma2{};
  };

  std::string name_;
  crypto::SecretKey key_;
  crypto::EncryptedKey enc_key_;
  crypto::Seed seed_;
  std::optional<Session> session_;
  std::variant<std::monostate, ShoppingFlight, CheckoutFlight, AftersalesFlight> flight_;
  crypto::Rng rng_;
};

}  // namespace flipflag

#endif  // FLIPFLAG_TAG_M_HPP
