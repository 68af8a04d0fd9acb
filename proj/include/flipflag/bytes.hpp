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

#ifndef FLIPFLAG_BYTES_HPP
#define FLIPFLAG_BYTES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flipflag {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Every failure mode a protocol operation can report.
enum class ProtoError : std::uint8_t {
  DecryptError = 1,
  AuthFailure,
  IntegrityFailure,
  NoSession,
  Inactive,
  ActiveTag,
  Rejected,
  UnknownPseudonym,
  MalformedMessage,
  ChannelLoss,
  CorruptStore,
  ScriptError,
};

std::string_view to_string(ProtoError e);

/// Value-or-error result. Protocol failures are modeled outcomes, not
/// exceptions; callers branch on ok().
template <typename T>
class Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}          // NOLINT(google-explicit-constructor)
  Outcome(ProtoError error) : v_(error) {}            // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T& value() & { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }

  ProtoError error() const { return std::get<ProtoError>(v_); }

 private:
  std::variant<T, ProtoError> v_;
};

using Status = Outcome<std::monostate>;

inline Status ok_status() { return Status(std::monostate{}); }

std::string to_hex(ByteView data);
std::optional<Bytes> from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

Bytes concat(std::initializer_list<ByteView> parts);

void store_be32(std::uint8_t* out, std::uint32_t v);
void store_be64(std::uint8_t* out, std::uint64_t v);
std::uint32_t load_be32(const std::uint8_t* in);
std::uint64_t load_be64(const std::uint8_t* in);

/// True when needle occurs as a contiguous substring of haystack.
bool contains(ByteView haystack, ByteView needle);

}  // namespace flipflag

#endif  // FLIPFLAG_BYTES_HPP
