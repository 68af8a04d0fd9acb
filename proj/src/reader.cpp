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

#include "flipflag/reader.hpp"

namespace flipflag {

Reader::Reader(std::string name, Server& server, Channel& channel, crypto::Rng rng)
    : name_(std::move(name)), server_(server), channel_(channel), rng_(rng) {}

void Reader::begin_cart() {
  session_ = server_.begin_session();
  cart_tags_.clear();
}

Outcome<wire::ProtocolMessage> Reader::transmit(std::string_view from, std::string_view to,
                                                const wire::ProtocolMessage& m) {
  auto delivered = channel_.transmit(from, to, wire::encode(m));
  if (!delivered) return ProtoError::ChannelLoss;
  return wire::decode(*delivered);
}

Status Reader::shop(MTag& tag) {
  if (!session_) return ProtoError::NoSession;

  const crypto::Nonce gamma1 = rng_.nonce();
  auto challenge = expect<wire::Challenge>(
      transmit(name_, tag.name(), wire::Challenge{gamma1}));
  if (!challenge.ok()) return challenge.error();

  wire::AuthResponse resp = tag.auth_response(challenge.value().gamma1);
  auto resp_rx = expect<wire::AuthResponse>(transmit(tag.name(), name_, resp));
  if (!resp_rx.ok()) return resp_rx.error();

  auto provision = server_.provision(*session_, Server::TagKind::Member, resp_rx.value(),
                                     gamma1, std::nullopt);
  if (!provision.ok()) return provision.error();

  auto prov_rx = expect<wire::Provision>(
      transmit(name_, tag.name(), std::move(provision).value()));
  if (!prov_rx.ok()) return prov_rx.error();
  return tag.apply_provision(prov_rx.value());
}

Status Reader::shop(GTag& tag, const GoodsInfo& info) {
  if (!session_) return ProtoError::NoSession;

  const crypto::Nonce gamma1 = rng_.nonce();
  auto challenge = expect<wire::Challenge>(
      transmit(name_, tag.name(), wire::Challenge{gamma1}));
  if (!challenge.ok()) return challenge.error();

  auto resp = tag.auth_response(challenge.value().gamma1);
  if (!resp.ok()) return resp.error();
  auto resp_rx = expect<wire::AuthResponse>(transmit(tag.name(), name_, resp.value()));
  if (!resp_rx.ok()) return resp_rx.error();

  auto provision =
      server_.provision(*session_, Server::TagKind::Goods, resp_rx.value(), gamma1, info);
  if (!provision.ok()) return provision.error();

  auto prov_rx = expect<wire::Provision>(
      transmit(name_, tag.name(), std::move(provision).value()));
  if (!prov_rx.ok()) return prov_rx.error();

  Status st = tag.apply_provision(prov_rx.value());
  if (st.ok()) cart_tags_.push_back(&tag);
  return st;
}

Outcome<CheckoutResult> Reader::checkout(MTag& tag) {
  if (!session_) return ProtoError::NoSession;

  auto hello = tag.checkout_hello();
  if (!hello.ok()) return hello.error();
  auto hello_rx = expect<wire::CheckoutHello>(transmit(tag.name(), name_, hello.value()));
  if (!hello_rx.ok()) return hello_rx.error();
  const wire::Pseudonym n_i = hello_rx.value().n_i;

  auto issue = server_.checkout_issue(hello_rx.value());
  if (!issue.ok()) return issue.error();
  auto issue_rx = expect<wire::TimeIssue>(transmit(name_, tag.name(), issue.value()));
  if (!issue_rx.ok()) return issue_rx.error();

  auto wrapped = tag.checkout_wrap(issue_rx.value());
  if (!wrapped.ok()) return wrapped.error();
  auto wrapped_rx = expect<wire::KcgWrapped>(transmit(tag.name(), name_, wrapped.value()));
  if (!wrapped_rx.ok()) return wrapped_rx.error();

  auto broadcast = server_.checkout_unwrap(n_i, wrapped_rx.value());
  if (!broadcast.ok()) return broadcast.error();

  CheckoutResult result;
  for (GTag* g : cart_tags_) {
    auto bc_rx = expect<wire::DeactivateBroadcast>(
        transmit(name_, g->name(), broadcast.value()));
    if (!bc_rx.ok()) {
      result.tag_results.emplace_back(g->name(), Status(bc_rx.error()));
      continue;
    }
    result.tag_results.emplace_back(g->name(), g->deactivate(bc_rx.value()));
  }
  return result;
}

Outcome<AftersalesResult> Reader::aftersales(GTag& g_tag, MTag& m_tag) {
  auto reply = g_tag.inactive_reply();
  if (!reply.ok()) return reply.error();

  auto reply_rx = expect<wire::InactiveReply>(transmit(g_tag.name(), name_, reply.value()));
  if (!reply_rx.ok()) return reply_rx.error();
  // The server verifies both tags' proofs against this challenge.
  const crypto::Nonce gamma1 = reply_rx.value().gamma1;

  auto reply_fwd = expect<wire::InactiveReply>(transmit(name_, m_tag.name(), reply_rx.value()));
  if (!reply_fwd.ok()) return reply_fwd.error();

  wire::AftersalesMTag am = m_tag.aftersales_respond(reply_fwd.value());
  auto am_rx = expect<wire::AftersalesMTag>(transmit(m_tag.name(), name_, am));
  if (!am_rx.ok()) return am_rx.error();

  auto challenge = server_.aftersales_mtag(am_rx.value(), gamma1);
  if (!challenge.ok()) return challenge.error();
  const PendingUpdate pending = challenge.value().second;

  auto challenge_rx = expect<wire::ActivateChallenge>(
      transmit(name_, g_tag.name(), challenge.value().first));
  if (!challenge_rx.ok()) return challenge_rx.error();

  auto proof = g_tag.try_activate(challenge_rx.value());
  if (!proof.ok()) {
    if (proof.error() == ProtoError::Rejected) return AftersalesResult{};
    return proof.error();
  }

  auto proof_rx = expect<wire::GTagProof>(transmit(g_tag.name(), name_, proof.value()));
  if (!proof_rx.ok()) return proof_rx.error();

  auto decision = server_.aftersales_gtag(proof_rx.value(), gamma1, pending);
  if (!decision.ok()) return decision.error();

  AftersalesResult result;
  result.activated = true;
  result.decision = decision.value().first;

  auto ack_rx = expect<wire::KeyUpdateAck>(
      transmit(name_, m_tag.name(), decision.value().second));
  if (!ack_rx.ok()) {
    result.ack_error = ack_rx.error();
    return result;
  }
  Status st = m_tag.apply_key_update(ack_rx.value());
  if (!st.ok()) {
    result.ack_error = st.error();
    return result;
  }
  result.key_updated = true;
  return result;
}

}  // namespace flipflag
