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

#include "flipflag/simnet.hpp"

#include <memory>
#include <sstream>

#include <json.hpp>

#include "flipflag/wire.hpp"

namespace flipflag {

using nlohmann::json;

std::string Transcript::to_jsonl() const {
  std::ostringstream out;
  for (const auto& ev : events_) {
    json j;
    j["seq"] = ev.seq;
    j["time"] = ev.time;
    j["from"] = ev.from;
    j["to"] = ev.to;
    j["kind"] = std::string(wire::kind_name(ev.kind));
    j["action"] = ev.action;
    j["sent"] = to_hex(ev.sent);
    if (ev.delivered && *ev.delivered != ev.sent) j["delivered"] = to_hex(*ev.delivered);
    j["note"] = ev.note;
    out << j.dump() << "\n";
  }
  return out.str();
}

Outcome<Transcript> Transcript::parse_jsonl(std::string_view text) {
  Transcript t;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) return ProtoError::MalformedMessage;
    try {
      ChannelEvent ev;
      ev.seq = j.at("seq").get<std::uint64_t>();
      ev.time = j.at("time").get<std::uint64_t>();
      ev.from = j.at("from").get<std::string>();
      ev.to = j.at("to").get<std::string>();
      ev.action = j.at("action").get<std::string>();
      ev.note = j.at("note").get<std::string>();
      auto kind = wire::kind_from_name(j.at("kind").get<std::string>());
      ev.kind = kind.value_or(0);
      auto sent = from_hex(j.at("sent").get<std::string>());
      if (!sent) return ProtoError::MalformedMessage;
      ev.sent = *sent;
      if (j.contains("delivered")) {
        auto delivered = from_hex(j.at("delivered").get<std::string>());
        if (!delivered) return ProtoError::MalformedMessage;
        ev.delivered = *delivered;
      } else if (ev.action != "drop") {
        ev.delivered = ev.sent;
      }
      t.append(std::move(ev));
    } catch (const json::exception&) {
      return ProtoError::MalformedMessage;
    }
  }
  return t;
}

crypto::Digest Transcript::hash() const {
  const std::string jsonl = to_jsonl();
  return crypto::hash_fields({as_bytes(jsonl)});
}

bool Transcript::contains_bytes(ByteView needle) const {
  for (const auto& ev : events_) {
    if (contains(ev.sent, needle)) return true;
    if (ev.delivered && contains(*ev.delivered, needle)) return true;
  }
  return false;
}

std::optional<Bytes> Channel::transmit(std::string_view from, std::string_view to,
                                       const Bytes& msg, std::string_view note) {
  ChannelEvent ev;
  ev.seq = transcript_.size();
  ev.time = clock_->now();
  ev.from = std::string(from);
  ev.to = std::string(to);
  ev.kind = wire::peek_kind(msg);
  ev.sent = msg;
  ev.note = std::string(note);

  AdversaryAction action;
  if (policy_) {
    action = policy_(transcript_, PendingSend{ev.seq, from, to, ev.kind, msg});
  }

  switch (action.type) {
    case AdversaryAction::Type::Pass:
      ev.action = "pass";
      ev.delivered = msg;
      break;
    case AdversaryAction::Type::Drop:
      ev.action = "drop";
      break;
    case AdversaryAction::Type::FlipBit: {
      const std::size_t bit = msg.empty() ? 0 : action.bit % (msg.size() * 8);
      Bytes mod = msg;
      if (!mod.empty()) mod[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ev.action = "flip_bit:" + std::to_string(bit);
      ev.delivered = std::move(mod);
      break;
    }
    case AdversaryAction::Type::Replay: {
      ev.action = "replay:" + std::to_string(action.replay_seq);
      if (action.replay_seq < transcript_.size()) {
        ev.delivered = transcript_.events()[action.replay_seq].sent;
      } else {
        ev.delivered = msg;
      }
      break;
    }
    case AdversaryAction::Type::Inject:
      ev.action = "inject";
      ev.delivered = action.payload;
      break;
  }

  std::optional<Bytes> delivered = ev.delivered;
  transcript_.append(std::move(ev));
  return delivered;
}

namespace {

// Policies key their trigger window off the first call so that events from
// earlier phases do not count against them.
struct InstallPoint {
  std::optional<std::uint64_t> seq;
};

std::uint64_t window_start(const std::shared_ptr<InstallPoint>& p, const Transcript& t) {
  if (!p->seq) p->seq = t.size();
  return *p->seq;
}

std::size_t count_since(const Transcript& t, std::uint64_t start, std::uint8_t kind,
                        std::string_view action_prefix) {
  std::size_t n = 0;
  for (std::size_t i = start; i < t.size(); ++i) {
    const auto& ev = t.events()[i];
    if (ev.kind == kind && ev.action.rfind(action_prefix, 0) == 0) ++n;
  }
  return n;
}

}  // namespace

AdversaryPolicy drop_kind_policy(std::uint8_t kind, std::size_t count) {
  auto install = std::make_shared<InstallPoint>();
  return [=](const Transcript& t, const PendingSend& p) {
    const std::uint64_t start = window_start(install, t);
    if (p.kind == kind && count_since(t, start, kind, "drop") < count) {
      return AdversaryAction::drop();
    }
    return AdversaryAction::pass();
  };
}

AdversaryPolicy flip_bit_policy(std::uint8_t kind, std::size_t bit) {
  auto install = std::make_shared<InstallPoint>();
  return [=](const Transcript& t, const PendingSend& p) {
    const std::uint64_t start = window_start(install, t);
    if (p.kind == kind && count_since(t, start, kind, "flip_bit") == 0) {
      return AdversaryAction::flip_bit(bit);
    }
    return AdversaryAction::pass();
  };
}

AdversaryPolicy replay_policy(std::uint8_t kind, std::uint64_t recorded_seq) {
  auto install = std::make_shared<InstallPoint>();
  return [=](const Transcript& t, const PendingSend& p) {
    const std::uint64_t start = window_start(install, t);
    if (p.kind == kind && count_since(t, start, kind, "replay") == 0) {
      return AdversaryAction::replay(recorded_seq);
    }
    return AdversaryAction::pass();
  };
}

}  // namespace flipflag
