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

#ifndef FLIPFLAG_SCENARIO_HPP
#define FLIPFLAG_SCENARIO_HPP

#include <map>
#include <string>
#include <vector>

#include "flipflag/reader.hpp"

namespace flipflag {

/**
 * One simulated deployment: clock, server, adversarial channel, a cart
 * reader, a service-desk reader, and any number of cards and goods tags.
 * Entity RNG streams are forked from the master seed by name, so creation
 * order does not affect determinism.
 */
class World {
 public:
  explicit World(const crypto::Seed& seed, ServerConfig cfg = {});

  SimClock clock;
  Channel channel;
  Server server;
  Reader cart;
  Reader desk;

  MTag& add_card(const std::string& name);
  GTag& add_goods(const std::string& name, GoodsInfo info);

  bool has_card(const std::string& name) const { return cards_.count(name) != 0; }
  bool has_goods(const std::string& name) const { return goods_.count(name) != 0; }
  MTag& card(const std::string& name) { return cards_.at(name); }
  GTag& goods(const std::string& name) { return goods_.at(name); }
  const GoodsInfo& goods_info(const std::string& name) const { return goods_info_.at(name); }

  /// Every secret any entity ever held: full key chains (with lookahead for
  /// in-flight updates), activation seeds, session tokens, server private
  /// keys. Input for the transcript hygiene scan.
  std::vector<Bytes> collect_secrets() const;

  /// Committed-state fingerprint per entity, keyed by entity name plus
  /// "server".
  std::map<std::string, Bytes> fingerprints() const;

 private:
  std::map<std::string, MTag> cards_;
  std::map<std::string, GTag> goods_;
  std::map<std::string, GoodsInfo> goods_info_;
  std::map<std::string, crypto::SecretKey> initial_keys_;
  std::uint64_t next_goods_id_ = 1;
  crypto::Rng master_;
};

struct ScriptAction {
  std::string verb;
  std::vector<std::pair<std::string, std::string>> args;
  std::string raw;
  std::size_t line_no = 0;

  std::optional<std::string> arg(std::string_view key) const;
};

/// Parses the one-action-per-line scenario format. Lines are
/// `verb key=value ...`; `#` starts a comment. ScriptError on anything
/// unrecognized.
Outcome<std::vector<ScriptAction>> parse_script(std::string_view text);

struct StepResult {
  std::string action;
  std::string outcome;
  bool ok = false;
};

struct ScenarioReport {
  std::vector<StepResult> steps;
  bool all_ok = false;
  bool secrets_clean = false;
  crypto::Digest transcript_hash{};

  bool nominal() const { return all_ok && secrets_clean; }
};

struct ScenarioResult {
  Transcript transcript;
  ScenarioReport report;
};

/// Runs a script against a fresh world. Deterministic for a fixed
/// (script, seed, config).
Outcome<ScenarioResult> run_scenario(std::string_view script_text, const crypto::Seed& seed,
                                     ServerConfig cfg = {});

/// The canonical happy path: enroll one card, shop three goods, check out,
/// return one good in warranty.
std::string demo_script();

}  // namespace flipflag

#endif  // FLIPFLAG_SCENARIO_HPP
