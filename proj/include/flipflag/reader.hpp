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

#ifndef FLIPFLAG_READER_HPP
#define FLIPFLAG_READER_HPP

#include <string>
#include <utility>
#include <vector>

#include "flipflag/server.hpp"
#include "flipflag/simnet.hpp"
#include "flipflag/tag_g.hpp"
#include "flipflag/tag_m.hpp"

namespace flipflag {

struct CheckoutResult {
  std::vector<std::pair<std::string, Status>> tag_results;

  bool all_deactivated() const {
    for (const auto& [name, st] : tag_results) {
      if (!st.ok()) return false;
    }
    return true;
  }
};

struct AftersalesResult {
  bool activated = false;
  std::optional<ServiceDecision> decision;
  bool key_updated = false;
  std::optional<ProtoError> ack_error;

  bool nominal() const {
    return activated && decision == ServiceDecision::Granted && key_updated;
  }
};

/**
 * Protocol orchestrator: generates the initial challenges, forwards messages
 * between tags and the server, and broadcasts checkout deactivation to every
 * tag authenticated in the current cart session. Holds no long-term secrets.
 *
 * Tag links traverse the adversarial channel; the reader-server link is a
 * trusted in-process call.
 */
class Reader {
 public:
  Reader(std::string name, Server& server, Channel& channel, crypto::Rng rng);

  /// Opens a fresh cart session and forgets the previous tag population.
  void begin_cart();

  /// Shopping phase for the membership card.
  Status shop(MTag& tag);

  /// Shopping phase for one goods tag; requires the card to have shopped
  /// first in this session.
  Status shop(GTag& tag, const GoodsInfo& info);

  /// Checkout: time issue, key wrap, and deactivation broadcast to every
  /// goods tag of the session.
  Outcome<CheckoutResult> checkout(MTag& tag);

  /// After-sales flow for one returned goods tag with its owning card.
  Outcome<AftersalesResult> aftersales(GTag& g_tag, MTag& m_tag);

  const std::string& name() const { return name_; }

 private:
  Outcome<wire::ProtocolMessage> transmit(std::string_view from, std::string_view to,
                                          const wire::ProtocolMessage& m);

  template <typename T>
  Outcome<T> expect(Outcome<wire::ProtocolMessage> r) {
    if (!r.ok()) return r.error();
    if (auto* m = std::get_if<T>(&r.value())) return std::move(*m);
    return ProtoError::MalformedMessage;
  }

  std::string name_;
  Server& server_;
  Channel& channel_;
  crypto::Rng rng_;
  std::optional<std::uint64_t> session_;
  std::vector<GTag*> cart_tags_;
};

}  // namespace flipflag

#endif  // FLIPFLAG_READER_HPP
