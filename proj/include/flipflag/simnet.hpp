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

#ifndef FLIPFLAG_SIMNET_HPP
#define FLIPFLAG_SIMNET_HPP

#include <functional>
#include <string>
#include <vector>

#include "flipflag/clock.hpp"
#include "flipflag/crypto.hpp"

namespace flipflag {

/// What the adversary does to one message in flight.
struct AdversaryAction {
  enum class Type { Pass, Drop, FlipBit, Replay, Inject };

  Type type = Type::Pass;
  std::size_t bit = 0;        // FlipBit: absolute bit offset into the message
  std::uint64_t replay_seq = 0;  // Replay: transcript event to substitute
  Bytes payload;              // Inject: delivered instead of the original

  static AdversaryAction pass() { return {}; }
  static AdversaryAction drop() { return {Type::Drop, 0, 0, {}}; }
  static AdversaryAction flip_bit(std::size_t bit) { return {Type::FlipBit, bit, 0, {}}; }
  static AdversaryAction replay(std::uint64_t seq) { return {Type::Replay, 0, seq, {}}; }
  static AdversaryAction inject(Bytes payload) {
    return {Type::Inject, 0, 0, std::move(payload)};
  }
};

/// One recorded air-interface event. `sent` is what the sender emitted;
/// `delivered` is what arrived (empty on drop, equal to `sent` on pass).
struct ChannelEvent {
  std::uint64_t seq = 0;
  std::uint64_t time = 0;
  std::string from;
  std::string to;
  std::uint8_t kind = 0;
  Bytes sent;
  std::string action = "pass";
  std::optional<Bytes> delivered;
  std::string note;
};

/// Append-only record of every channel event. Replaying the honest messages
/// through fresh entities with the same seed reproduces it byte-exactly.
class Transcript {
 public:
  void append(ChannelEvent ev) { events_.push_back(std::move(ev)); }
  const std::vector<ChannelEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  std::string to_jsonl() const;
  static Outcome<Transcript> parse_jsonl(std::string_view text);

  crypto::Digest hash() const;

  /// True when needle occurs contiguously in any sent or delivered payload.
  bool contains_bytes(ByteView needle) const;

 private:
  std::vector<ChannelEvent> events_;
};

struct PendingSend {
  std::uint64_t seq;
  std::string_view from;
  std::string_view to;
  std::uint8_t kind;
  const Bytes& bytes;
};

/// Decides the adversary action for a message about to be delivered, given
/// everything observed so far. Must be a pure function of its arguments.
using AdversaryPolicy = std::function<AdversaryAction(const Transcript&, const PendingSend&)>;

/// The tag<->reader air interface. Applies the adversary policy, records the
/// event, and returns the delivered bytes (or nothing when dropped).
class Channel {
 public:
  explicit Channel(const SimClock* clock) : clock_(clock) {}

  void set_policy(AdversaryPolicy policy) { policy_ = std::move(policy); }
  void clear_policy() { policy_ = nullptr; }

  std::optional<Bytes> transmit(std::string_view from, std::string_view to, const Bytes& msg,
                                std::string_view note = {});

  const Transcript& transcript() const { return transcript_; }

 private:
  const SimClock* clock_;
  AdversaryPolicy policy_;
  Transcript transcript_;
};

// Ready-made policies for scripted scenarios and attack suites.

/// Drops the first `count` messages of the given kind seen after installation.
AdversaryPolicy drop_kind_policy(std::uint8_t kind, std::size_t count = 1);

/// Flips one bit of the first message of the given kind seen after
/// installation; later occurrences pass.
AdversaryPolicy flip_bit_policy(std::uint8_t kind, std::size_t bit);

/// Substitutes a previously recorded transcript event's sent bytes for the
/// first message of the given kind.
AdversaryPolicy replay_policy(std::uint8_t kind, std::uint64_t recorded_seq);

}  // namespace flipflag

#endif  // FLIPFLAG_SIMNET_HPP
