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

#include "flipflag/server.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace flipflag {

using crypto::hash_fields;
using nlohmann::json;

namespace {

constexpr std::string_view kStoreMagic = "flipflag-store v1";

template <std::size_t N>
std::optional<std::array<std::uint8_t, N>> hex_to_array(const std::string& hex) {
  auto bytes = from_hex(hex);
  if (!bytes || bytes->size() != N) return std::nullopt;
  std::array<std::uint8_t, N> out{};
  std::memcpy(out.data(), bytes->data(), N);
  return out;
}

}  // namespace

std::string_view to_string(ServiceDecision d) {
  switch (d) {
    case ServiceDecision::Granted: return "Granted";
    case ServiceDecision::DeniedExpired: return "DeniedExpired";
    case ServiceDecision::DeniedForged: return "DeniedForged";
  }
  return "Unknown";
}

Server::Server(ServerConfig cfg, const SimClock* clock, crypto::Rng rng)
    : config_(cfg), clock_(clock), rng_(rng), keys_(crypto::ServerKeyPair::generate(rng_)) {}

wire::TxTime Server::now_quantized() const {
  return wire::TxTime::quantize(clock_->now(), config_.dj_granularity);
}

Server::IssuedCard Server::issue_card() {
  IssuedCard card;
  rng_.fill(card.key);
  card.enc_key = crypto::pke_encrypt(keys_.box.pk, card.key, rng_);
  rng_.fill(card.activation_seed);
  return card;
}

Server::IssuedTag Server::issue_goods_tag() {
  IssuedTag tag;
  rng_.fill(tag.key);
  tag.enc_key = crypto::pke_encrypt(keys_.box.pk, tag.key, rng_);
  return tag;
}

std::uint64_t Server::begin_session() {
  const std::uint64_t id = next_session_++;
  sessions_[id] = CartSession{};
  return id;
}

Outcome<wire::Provision> Server::provision(std::uint64_t session, TagKind kind,
                                           const wire::AuthResponse& resp,
                                           const crypto::Nonce& gamma1,
                                           const std::optional<GoodsInfo>& goods_info) {
  auto sess_it = sessions_.find(session);
  if (sess_it == sessions_.end()) return ProtoError::NoSession;
  CartSession& sess = sess_it->second;
  if (kind == TagKind::Goods && (!goods_info || !sess.member)) return ProtoError::NoSession;

  auto key = crypto::pke_decrypt(keys_.box, resp.t);
  if (!key.ok()) return ProtoError::AuthFailure;
  const crypto::SecretKey k = key.value();
  if (resp.v != hash_fields({k, gamma1})) return ProtoError::AuthFailure;

  // Key chain step: the record keeps the post-update key, which is the key
  // the tag holds once it commits this provision.
  const crypto::SecretKey k_new = hash_fields({k});
  const crypto::EncryptedKey t_new = crypto::pke_encrypt(keys_.box.pk, k_new, rng_);

  if (!sess.w) {
    wire::ShoppingToken w{};
    rng_.fill(w);
    sess.w = w;
  }
  const wire::ShoppingToken& w = *sess.w;

  wire::Provision out;
  Bytes masked = crypto::apply_mask(k, resp.gamma2, wire::pack_wkt(w, k_new, t_new));
  std::memcpy(out.alpha1.data(), masked.data(), out.alpha1.size());
  out.beta1 = hash_fields({w, k_new, t_new, resp.gamma2});

  if (kind == TagKind::Member) {
    wire::Pseudonym n_i{};
    do {
      rng_.fill(n_i);
    } while (records_.count(n_i) != 0);

    TransactionRecord rec;
    rec.n_i = n_i;
    rec.k_ci_current = k_new;
    rec.w = w;
    rec.created_at = now_quantized();
    records_[n_i] = std::move(rec);
    sess.member = n_i;

    out.alpha2 = crypto::apply_mask(w, resp.gamma2, n_i);
    out.beta2 = hash_fields({n_i, resp.gamma2});
  } else {
    wire::Receipt receipt;
    receipt.shop_serial = config_.shop_serial;
    receipt.price = goods_info->price;
    receipt.tx_time = now_quantized();
    receipt.discount = goods_info->discount;
    receipt.signature = crypto::sign_receipt(keys_.sig, receipt.body());

    records_[*sess.member].goods.emplace_back(goods_info->goods_id, receipt);

    const auto receipt_bytes = receipt.bytes();
    out.alpha2 = crypto::apply_mask(w, resp.gamma2, receipt_bytes);
    out.beta2 = hash_fields({receipt_bytes, resp.gamma2});
  }
  return out;
}

Outcome<wire::TimeIssue> Server::checkout_issue(const wire::CheckoutHello& hello) {
  auto rec_it = records_.find(hello.n_i);
  if (rec_it == records_.end()) return ProtoError::UnknownPseudonym;
  TransactionRecord& rec = rec_it->second;

  // A retried checkout keeps the originally issued transaction time so the
  // derived deactivate/activate key stays stable.
  if (!rec.d_j) rec.d_j = now_quantized();
  const auto d_bytes = rec.d_j->bytes();

  wire::TimeIssue out;
  const crypto::Digest pad = hash_fields({rec.k_ci_current, hello.gamma1});
  for (std::size_t i = 0; i < out.alpha1.size(); ++i) out.alpha1[i] = d_bytes[i] ^ pad[i];
  out.beta1 = hash_fields({d_bytes, hello.gamma1});
  out.gamma2 = rng_.nonce();
  checkout_flights_[hello.n_i] = out.gamma2;
  return out;
}

Outcome<wire::DeactivateBroadcast> Server::checkout_unwrap(const wire::Pseudonym& n_i,
                                                           const wire::KcgWrapped& wrapped) {
  auto rec_it = records_.find(n_i);
  if (rec_it == records_.end()) return ProtoError::UnknownPseudonym;
  auto flight_it = checkout_flights_.find(n_i);
  if (flight_it == checkout_flights_.end()) return ProtoError::IntegrityFailure;
  const crypto::Nonce gamma2 = flight_it->second;

  Bytes plain = crypto::apply_mask(rec_it->second.k_ci_current, gamma2, wrapped.alpha2);
  std::array<std::uint8_t, wire::kTokenLen> delta{};
  crypto::Digest nu{};
  std::memcpy(delta.data(), plain.data(), delta.size());
  std::memcpy(nu.data(), plain.data() + delta.size(), nu.size());
  if (!crypto::integrity_ok(wrapped.beta2, hash_fields({delta, nu, gamma2}))) {
    return ProtoError::IntegrityFailure;
  }

  checkout_flights_.erase(flight_it);
  wire::DeactivateBroadcast out;
  out.delta = delta;
  out.nu = nu;
  out.gamma2 = gamma2;
  return out;
}

Outcome<std::pair<wire::ActivateChallenge, PendingUpdate>> Server::aftersales_mtag(
    const wire::AftersalesMTag& msg, const crypto::Nonce& gamma1) {
  auto key = crypto::pke_decrypt(keys_.box, msg.t_ci);
  if (!key.ok()) return ProtoError::AuthFailure;
  const crypto::SecretKey k = key.value();
  if (msg.v1 != hash_fields({k, gamma1})) return ProtoError::AuthFailure;

  PendingUpdate pending;
  pending.key_before = k;
  pending.key_next = hash_fields({k});
  pending.enc_key_next = crypto::pke_encrypt(keys_.box.pk, pending.key_next, rng_);
  pending.gamma2_m = msg.gamma2;

  Bytes plain = crypto::apply_mask(k, gamma1, msg.alpha1);
  crypto::Digest delta{};
  std::memcpy(delta.data(), plain.data(), delta.size());
  if (!crypto::integrity_ok(msg.beta1, hash_fields({delta, gamma1}))) {
    return ProtoError::IntegrityFailure;
  }

  return std::make_pair(wire::ActivateChallenge{delta}, pending);
}

Outcome<std::pair<ServiceDecision, wire::KeyUpdateAck>> Server::aftersales_gtag(
    const wire::GTagProof& proof, const crypto::Nonce& gamma1, const PendingUpdate& pending) {
  auto key = crypto::pke_decrypt(keys_.box, proof.t_g);
  if (!key.ok()) return ProtoError::AuthFailure;
  if (proof.v2 != hash_fields({key.value(), gamma1})) return ProtoError::AuthFailure;

  ServiceDecision decision;
  if (!crypto::verify_receipt(keys_.sig.pk, proof.receipt.body(), proof.receipt.signature)) {
    decision = ServiceDecision::DeniedForged;
  } else {
    // Inclusive boundary: a return on exactly the last warranty day is
    // still served.
    const std::uint64_t elapsed = clock_->now() - proof.receipt.tx_time.seconds;
    decision = elapsed <= static_cast<std::uint64_t>(config_.warranty_days) * 86'400
                   ? ServiceDecision::Granted
                   : ServiceDecision::DeniedExpired;
  }

  wire::KeyUpdateAck ack;
  Bytes masked = crypto::apply_mask(
      pending.key_before, pending.gamma2_m,
      concat({ByteView(pending.key_next), ByteView(pending.enc_key_next)}));
  std::memcpy(ack.alpha2.data(), masked.data(), ack.alpha2.size());
  ack.beta2 = hash_fields({pending.key_next, pending.enc_key_next, pending.gamma2_m});
  return std::make_pair(decision, ack);
}

Status Server::snapshot(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return ProtoError::CorruptStore;

  json header;
  header["box_pk"] = to_hex(keys_.box.pk);
  header["box_sk"] = to_hex(keys_.box.sk);
  header["sig_pk"] = to_hex(keys_.sig.pk);
  header["sig_sk"] = to_hex(keys_.sig.sk);
  header["warranty_days"] = config_.warranty_days;
  header["dj_granularity"] = config_.dj_granularity;
  header["shop_serial"] = config_.shop_serial;
  header["records"] = records_.size();

  out << kStoreMagic << "\n" << header.dump() << "\n";
  for (const auto& [n_i, rec] : records_) {
    json j;
    j["n_i"] = to_hex(rec.n_i);
    j["k_ci"] = to_hex(rec.k_ci_current);
    j["w"] = to_hex(rec.w);
    if (rec.d_j) {
      j["d_j"] = rec.d_j->seconds;
    } else {
      j["d_j"] = nullptr;
    }
    j["created_at"] = rec.created_at.seconds;
    json goods = json::array();
    for (const auto& [id, receipt] : rec.goods) {
      goods.push_back({{"id", id}, {"receipt", to_hex(receipt.bytes())}});
    }
    j["goods"] = goods;
    out << j.dump() << "\n";
  }
  out.flush();
  return out ? ok_status() : Status(ProtoError::CorruptStore);
}

Outcome<Server> Server::restore(const std::string& path, const SimClock* clock,
                                crypto::Rng rng) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return ProtoError::CorruptStore;

  std::string line;
  if (!std::getline(in, line) || line != kStoreMagic) return ProtoError::CorruptStore;
  if (!std::getline(in, line)) return ProtoError::CorruptStore;

  json header = json::parse(line, nullptr, false);
  if (header.is_discarded()) return ProtoError::CorruptStore;

  Server server(ServerConfig{}, clock, rng);
  try {
    server.config_.warranty_days = header.at("warranty_days").get<std::uint32_t>();
    server.config_.dj_granularity = header.at("dj_granularity").get<std::uint64_t>();
    server.config_.shop_serial = header.at("shop_serial").get<std::uint64_t>();

    auto box_pk = hex_to_array<32>(header.at("box_pk").get<std::string>());
    auto box_sk = hex_to_array<32>(header.at("box_sk").get<std::string>());
    auto sig_pk = hex_to_array<32>(header.at("sig_pk").get<std::string>());
    auto sig_sk = hex_to_array<64>(header.at("sig_sk").get<std::string>());
    if (!box_pk || !box_sk || !sig_pk || !sig_sk) return ProtoError::CorruptStore;
    server.keys_.box.pk = *box_pk;
    server.keys_.box.sk = *box_sk;
    server.keys_.sig.pk = *sig_pk;
    server.keys_.sig.sk = *sig_sk;

    const auto expected = header.at("records").get<std::size_t>();
    for (std::size_t i = 0; i < expected; ++i) {
      if (!std::getline(in, line)) return ProtoError::CorruptStore;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) return ProtoError::CorruptStore;

      TransactionRecord rec;
      auto n_i = hex_to_array<wire::kPseudonymLen>(j.at("n_i").get<std::string>());
      auto k_ci = hex_to_array<crypto::kKeyLen>(j.at("k_ci").get<std::string>());
      auto w = hex_to_array<wire::kTokenLen>(j.at("w").get<std::string>());
      if (!n_i || !k_ci || !w) return ProtoError::CorruptStore;
      rec.n_i = *n_i;
      rec.k_ci_current = *k_ci;
      rec.w = *w;
      if (!j.at("d_j").is_null()) rec.d_j = wire::TxTime{j.at("d_j").get<std::uint64_t>()};
      rec.created_at = wire::TxTime{j.at("created_at").get<std::uint64_t>()};
      for (const auto& g : j.at("goods")) {
        auto receipt_hex = from_hex(g.at("receipt").get<std::string>());
        if (!receipt_hex) return ProtoError::CorruptStore;
        auto receipt = wire::Receipt::parse(*receipt_hex);
        if (!receipt.ok()) return ProtoError::CorruptStore;
        rec.goods.emplace_back(g.at("id").get<std::uint64_t>(), receipt.value());
      }
      server.records_[rec.n_i] = std::move(rec);
    }
  } catch (const json::exception&) {
    return ProtoError::CorruptStore;
  }
  return server;
}

Bytes Server::fingerprint() const {
  Bytes out = concat({keys_.box.pk, keys_.box.sk, keys_.sig.pk, keys_.sig.sk});
  std::uint8_t cfg[20];
  store_be32(cfg, config_.warranty_days);
  store_be64(cfg + 4, config_.dj_granularity);
  store_be64(cfg + 12, config_.shop_serial);
  out.insert(out.end(), cfg, cfg + sizeof(cfg));
  for (const auto& [n_i, rec] : records_) {
    out.insert(out.end(), n_i.begin(), n_i.end());
    out.insert(out.end(), rec.k_ci_current.begin(), rec.k_ci_current.end());
    out.insert(out.end(), rec.w.begin(), rec.w.end());
    out.push_back(rec.d_j ? 1 : 0);
    if (rec.d_j) {
      auto d = rec.d_j->bytes();
      out.insert(out.end(), d.begin(), d.end());
    }
    auto c = rec.created_at.bytes();
    out.insert(out.end(), c.begin(), c.end());
    for (const auto& [id, receipt] : rec.goods) {
      std::uint8_t idb[8];
      store_be64(idb, id);
      out.insert(out.end(), idb, idb + 8);
      auto r = receipt.bytes();
      out.insert(out.end(), r.begin(), r.end());
    }
  }
  return out;
}

}  // namespace flipflag
