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

#ifndef FLIPFLAG_SERVER_HPP
#define FLIPFLAG_SERVER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flipflag/clock.hpp"
#include "flipflag/wire.hpp"

namespace flipflag {

struct GoodsInfo {
  std::uint64_t goods_id = 0;
  std::uint64_t price = 0;
  std::uint64_t discount = 0;
};

enum class ServiceDecision { Granted, DeniedExpired, DeniedForged };

std::string_view to_string(ServiceDecision d);

/// One per-transaction record, keyed by the shopping pseudonym.
struct TransactionRecord {
  wire::Pseudonym n_i{};
  crypto::SecretKey k_ci_current{};  // post-update key at record time
  wire::ShoppingToken w{};
  std::optional<wire::TxTime> d_j;   // set at checkout
  std::vector<std::pair<std::uint64_t, wire::Receipt>> goods;
  wire::TxTime created_at;

  bool operator==(const TransactionRecord&) const = default;
};

/// Key refresh computed during after-sales authentication, held until the
/// acknowledgment is built. Transient; discarded if the flow fails.
struct PendingUpdate {
  crypto::SecretKey key_before{};
  crypto::SecretKey key_next{};
  crypto::EncryptedKey enc_key_next{};
  crypto::Nonce gamma2_m{};
};

struct ServerConfig {
  std::uint32_t warranty_days = 365;
  std::uint64_t dj_granularity = wire::kDefaultTimeGranularity;
  std::uint64_t shop_serial = 7301;

  bool operator==(const ServerConfig&) const = default;
};

/**
 * Goods database and tag management center. Authenticates tags by decrypting
 * their carried key, provisions tokens/pseudonyms/receipts, issues the
 * transaction time at checkout, relays the wrapped deactivate/activate key
 * (which it cannot derive itself), and decides warranty service.
 *
 * Operations are serialized by the single-owner scenario runner; there is no
 * internal locking.
 */
class Server {
 public:
  enum class TagKind { Member, Goods };

  Server(ServerConfig cfg, const SimClock* clock, crypto::Rng rng);

  // -- enrollment ---------------------------------------------------------

  struct IssuedCard {
    crypto::SecretKey key{};
    crypto::EncryptedKey enc_key{};
    crypto::Seed activation_seed{};
  };
  IssuedCard issue_card();

  struct IssuedTag {
    crypto::SecretKey key{};
    crypto::EncryptedKey enc_key{};
  };
  IssuedTag issue_goods_tag();

  // -- shopping -----------------------------------------------------------

  /// Opens a cart session; all tags authenticated in it share one token.
  std::uint64_t begin_session();

  /// Shopping step 3. For goods tags a receipt is built from goods_info and
  /// appended to the session member's record; the member must have
  /// authenticated first.
  Outcome<wire::Provision> provision(std::uint64_t session, TagKind kind,
                                     const wire::AuthResponse& resp, const crypto::Nonce& gamma1,
                                     const std::optional<GoodsInfo>& goods_info);

  // -- checkout -----------------------------------------------------------

  Outcome<wire::TimeIssue> checkout_issue(const wire::CheckoutHello& hello);

  /// Checkout step 5: unmask and relay (delta, nu) verbatim. The server has
  /// no activation seed, so the deactivate/activate key stays opaque to it.
  Outcome<wire::DeactivateBroadcast> checkout_unwrap(const wire::Pseudonym& n_i,
                                                     const wire::KcgWrapped& wrapped);

  // -- after-sales --------------------------------------------------------

  Outcome<std::pair<wire::ActivateChallenge, PendingUpdate>> aftersales_mtag(
      const wire::AftersalesMTag& msg, const crypto::Nonce& gamma1);

  Outcome<std::pair<ServiceDecision, wire::KeyUpdateAck>> aftersales_gtag(
      const wire::GTagProof& proof, const crypto::Nonce& gamma1, const PendingUpdate& pending);

  // -- persistence --------------------------------------------------------

  Status snapshot(const std::string& path) const;
  static Outcome<Server> restore(const std::string& path, const SimClock* clock,
                                 crypto::Rng rng);

  // -- introspection ------------------------------------------------------

  const crypto::ServerKeyPair& keys() const { return keys_; }
  const std::map<wire::Pseudonym, TransactionRecord>& records() const { return records_; }
  const ServerConfig& config() const { return config_; }
  ServerConfig& config() { return config_; }

  /// Committed state (config, keys, records); sessions, checkout flights and
  /// RNG position excluded.
  Bytes fingerprint() const;

 private:
  struct CartSession {
    std::optional<wire::ShoppingToken> w;
    std::optional<wire::Pseudonym> member;
  };

  wire::TxTime now_quantized() const;

  ServerConfig config_;
  const SimClock* clock_;
  crypto::Rng rng_;
  crypto::ServerKeyPair keys_;
  std::map<wire::Pseudonym, TransactionRecord> records_;
  std::map<std::uint64_t, CartSession> sessions_;
  std::map<wire::Pseudonym, crypto::Nonce> checkout_flights_;
  std::uint64_t next_session_ = 1;
};

}  // namespace flipflag

#endif  // FLIPFLAG_SERVER_HPP
