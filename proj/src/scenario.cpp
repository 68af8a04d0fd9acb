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

#include "flipflag/scenario.hpp"

#include <charconv>
#include <sstream>

namespace flipflag {

World::World(const crypto::Seed& seed, ServerConfig cfg)
    : channel(&clock),
      server(cfg, &clock, crypto::Rng(seed).fork("server")),
      cart("reader/cart", server, channel, crypto::Rng(seed).fork("reader/cart")),
      desk("reader/desk", server, channel, crypto::Rng(seed).fork("reader/desk")),
      master_(seed) {}

MTag& World::add_card(const std::string& name) {
  auto issued = server.issue_card();
  const std::string full = "card/" + name;
  initial_keys_[full] = issued.key;
  auto [it, inserted] = cards_.emplace(
      name, MTag(full, issued.key, issued.enc_key, issued.activation_seed, master_.fork(full)));
  return it->second;
}

GTag& World::add_goods(const std::string& name, GoodsInfo info) {
  auto issued = server.issue_goods_tag();
  const std::string full = "goods/" + name;
  initial_keys_[full] = issued.key;
  if (info.goods_id == 0) info.goods_id = next_goods_id_++;
  goods_info_[name] = info;
  auto [it, inserted] =
      goods_.emplace(name, GTag(full, issued.key, issued.enc_key, master_.fork(full)));
  return it->second;
}

namespace {

// Walks the key chain from the issued key through the current one, plus a
// few steps of lookahead for updates that were computed but never committed.
void collect_chain(std::vector<Bytes>& out, const crypto::SecretKey& initial,
                   const crypto::SecretKey& current) {
  crypto::SecretKey k = initial;
  constexpr std::size_t kMaxChain = 4096;
  std::size_t extra = 4;
  for (std::size_t i = 0; i < kMaxChain; ++i) {
    out.emplace_back(k.begin(), k.end());
    if (k == current && i + 1 < kMaxChain) {
      for (std::size_t j = 0; j < extra; ++j) {
        k = crypto::hash_fields({k});
        out.emplace_back(k.begin(), k.end());
      }
      return;
    }
    k = crypto::hash_fields({k});
  }
}

}  // namespace

std::vector<Bytes> World::collect_secrets() const {
  std::vector<Bytes> out;
  for (const auto& [name, tag] : cards_) {
    collect_chain(out, initial_keys_.at("card/" + name), tag.key());
    out.emplace_back(tag.activation_seed().begin(), tag.activation_seed().end());
    if (tag.session()) {
      out.emplace_back(tag.session()->w.begin(), tag.session()->w.end());
    }
  }
  for (const auto& [name, tag] : goods_) {
    collect_chain(out, initial_keys_.at("goods/" + name), tag.key());
    if (tag.activation_key()) {
      out.emplace_back(tag.activation_key()->begin(), tag.activation_key()->end());
    }
    if (tag.session_token()) {
      out.emplace_back(tag.session_token()->begin(), tag.session_token()->end());
    }
  }
  out.emplace_back(server.keys().box.sk.begin(), server.keys().box.sk.end());
  out.emplace_back(server.keys().sig.sk.begin(), server.keys().sig.sk.end());
  for (const auto& [n_i, rec] : server.records()) {
    out.emplace_back(rec.k_ci_current.begin(), rec.k_ci_current.end());
    out.emplace_back(rec.w.begin(), rec.w.end());
  }
  return out;
}

std::map<std::string, Bytes> World::fingerprints() const {
  std::map<std::string, Bytes> out;
  out["server"] = server.fingerprint();
  for (const auto& [name, tag] : cards_) out["card/" + name] = tag.fingerprint();
  for (const auto& [name, tag] : goods_) out["goods/" + name] = tag.fingerprint();
  return out;
}

std::optional<std::string> ScriptAction::arg(std::string_view key) const {
  for (const auto& [k, v] : args) {
    if (k == key) return v;
  }
  return std::nullopt;
}

Outcome<std::vector<ScriptAction>> parse_script(std::string_view text) {
  std::vector<ScriptAction> actions;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string tok;
    ScriptAction action;
    action.line_no = line_no;
    while (tokens >> tok) {
      if (action.verb.empty()) {
        action.verb = tok;
        continue;
      }
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        action.args.emplace_back("name", tok);
      } else {
        action.args.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
      }
    }
    if (action.verb.empty()) continue;
    std::ostringstream raw;
    raw << action.verb;
    for (const auto& [k, v] : action.args) raw << ' ' << k << '=' << v;
    action.raw = raw.str();
    actions.push_back(std::move(action));
  }
  return actions;
}

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_csv(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto part = s.substr(pos, comma == std::string_view::npos ? comma : comma - pos);
    if (!part.empty()) out.emplace_back(part);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string status_str(const Status& st) {
  return st.ok() ? "ok" : std::string(to_string(st.error()));
}

}  // namespace

Outcome<ScenarioResult> run_scenario(std::string_view script_text, const crypto::Seed& seed,
                                     ServerConfig cfg) {
  auto parsed = parse_script(script_text);
  if (!parsed.ok()) return parsed.error();

  World world(seed, cfg);
  ScenarioReport report;
  bool all_ok = true;

  for (const auto& action : parsed.value()) {
    StepResult step;
    step.action = action.raw;
    std::ostringstream out;

    if (action.verb == "card") {
      auto name = action.arg("name");
      if (!name || world.has_card(*name)) return ProtoError::ScriptError;
      world.add_card(*name);
      step.ok = true;
      out << "enrolled";
    } else if (action.verb == "goods") {
      auto name = action.arg("name");
      if (!name || world.has_goods(*name)) return ProtoError::ScriptError;
      GoodsInfo info;
      if (auto p = action.arg("price")) {
        auto v = parse_u64(*p);
        if (!v) return ProtoError::ScriptError;
        info.price = *v;
      }
      if (auto d = action.arg("discount")) {
        auto v = parse_u64(*d);
        if (!v) return ProtoError::ScriptError;
        info.discount = *v;
      }
      if (auto i = action.arg("id")) {
        auto v = parse_u64(*i);
        if (!v) return ProtoError::ScriptError;
        info.goods_id = *v;
      }
      world.add_goods(*name, info);
      step.ok = true;
      out << "tagged";
    } else if (action.verb == "shop") {
      auto card_name = action.arg("card");
      if (!card_name || !world.has_card(*card_name)) return ProtoError::ScriptError;
      std::vector<std::string> goods_names;
      if (auto g = action.arg("goods")) goods_names = split_csv(*g);
      for (const auto& g : goods_names) {
        if (!world.has_goods(g)) return ProtoError::ScriptError;
      }
      world.cart.begin_cart();
      Status m_st = world.cart.shop(world.card(*card_name));
      step.ok = m_st.ok();
      out << "card=" << status_str(m_st);
      for (const auto& g : goods_names) {
        Status g_st = world.cart.shop(world.goods(g), world.goods_info(g));
        step.ok = step.ok && g_st.ok();
        out << ' ' << g << '=' << status_str(g_st);
      }
    } else if (action.verb == "checkout") {
      auto card_name = action.arg("card");
      if (!card_name || !world.has_card(*card_name)) return ProtoError::ScriptError;
      auto result = world.cart.checkout(world.card(*card_name));
      if (!result.ok()) {
        step.ok = false;
        out << to_string(result.error());
      } else {
        step.ok = result.value().all_deactivated();
        out << "deactivated=" << result.value().tag_results.size();
        for (const auto& [name, st] : result.value().tag_results) {
          if (!st.ok()) out << ' ' << name << '=' << status_str(st);
        }
      }
    } else if (action.verb == "aftersales") {
      auto card_name = action.arg("card");
      auto goods_name = action.arg("goods");
      if (!card_name || !world.has_card(*card_name)) return ProtoError::ScriptError;
      if (!goods_name || !world.has_goods(*goods_name)) return ProtoError::ScriptError;
      auto result = world.desk.aftersales(world.goods(*goods_name), world.card(*card_name));
      if (!result.ok()) {
        step.ok = false;
        out << to_string(result.error());
      } else {
        const auto& r = result.value();
        step.ok = r.nominal();
        out << "activated=" << (r.activated ? "yes" : "no");
        if (r.decision) out << " decision=" << to_string(*r.decision);
        if (r.ack_error) out << " ack=" << to_string(*r.ack_error);
      }
    } else if (action.verb == "advance") {
      std::uint64_t seconds = 0;
      if (auto d = action.arg("days")) {
        auto v = parse_u64(*d);
        if (!v) return ProtoError::ScriptError;
        seconds += *v * 86'400;
      }
      if (auto s = action.arg("seconds")) {
        auto v = parse_u64(*s);
        if (!v) return ProtoError::ScriptError;
        seconds += *v;
      }
      world.clock.advance(seconds);
      step.ok = true;
      out << "clock=" << world.clock.now();
    } else if (action.verb == "adversary") {
      auto mode = action.arg("mode").value_or("pass");
      if (mode == "pass") {
        world.channel.clear_policy();
        step.ok = true;
        out << "pass";
      } else {
        auto kind_name = action.arg("kind");
        if (!kind_name) return ProtoError::ScriptError;
        auto kind = wire::kind_from_name(*kind_name);
        if (!kind) return ProtoError::ScriptError;
        if (mode == "drop") {
          std::size_t count = 1;
          if (auto c = action.arg("count")) {
            auto v = parse_u64(*c);
            if (!v) return ProtoError::ScriptError;
            count = *v;
          }
          world.channel.set_policy(drop_kind_policy(*kind, count));
          step.ok = true;
          out << "drop " << *kind_name << " x" << count;
        } else if (mode == "flip") {
          std::size_t bit = 0;
          if (auto b = action.arg("bit")) {
            auto v = parse_u64(*b);
            if (!v) return ProtoError::ScriptError;
            bit = *v;
          }
          world.channel.set_policy(flip_bit_policy(*kind, bit));
          step.ok = true;
          out << "flip " << *kind_name << " bit=" << bit;
        } else {
          return ProtoError::ScriptError;
        }
      }
    } else {
      return ProtoError::ScriptError;
    }

    step.outcome = out.str();
    all_ok = all_ok && step.ok;
    report.steps.push_back(std::move(step));
  }

  report.all_ok = all_ok;
  report.secrets_clean = true;
  for (const auto& secret : world.collect_secrets()) {
    if (world.channel.transcript().contains_bytes(secret)) {
      report.secrets_clean = false;
      break;
    }
  }
  report.transcript_hash = world.channel.transcript().hash();

  return ScenarioResult{world.channel.transcript(), std::move(report)};
}

std::string demo_script() {
  return "card alice\n"
         "goods tv price=129900\n"
         "goods router price=59900 discount=5000\n"
         "goods cable price=1999\n"
         "shop card=alice goods=tv,router,cable\n"
         "checkout card=alice\n"
         "advance days=3\n"
         "aftersales card=alice goods=tv\n";
}

}  // namespace flipflag
