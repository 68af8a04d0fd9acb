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

#include "flipflag/bytes.hpp"

#include <algorithm>

namespace flipflag {

std::string_view to_string(ProtoError e) {
  switch (e) {
    case ProtoError::DecryptError: return "DecryptError";
    case ProtoError::AuthFailure: return "AuthFailure";
    case ProtoError::IntegrityFailure: return "IntegrityFailure";
    case ProtoError::NoSession: return "NoSession";
    case ProtoError::Inactive: return "Inactive";
    case ProtoError::ActiveTag: return "ActiveTag";
    case ProtoError::Rejected: return "Rejected";
    case ProtoError::UnknownPseudonym: return "UnknownPseudonym";
    case ProtoError::MalformedMessage: return "MalformedMessage";
    case ProtoError::ChannelLoss: return "ChannelLoss";
    case ProtoError::CorruptStore: return "CorruptStore";
    case ProtoError::ScriptError: return "ScriptError";
  }
  return "UnknownError";
}

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string to_hex(ByteView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0F]);
  }
  return out;
}

std::optional<Bytes> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Bytes concat(std::initializer_list<ByteView> parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  Bytes out;
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void store_be32(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 24);
  out[1] = static_cast<std::uint8_t>(v >> 16);
  out[2] = static_cast<std::uint8_t>(v >> 8);
  out[3] = static_cast<std::uint8_t>(v);
}

void store_be64(std::uint8_t* out, std::uint64_t v) {
  store_be32(out, static_cast<std::uint32_t>(v >> 32));
  store_be32(out + 4, static_cast<std::uint32_t>(v));
}

std::uint32_t load_be32(const std::uint8_t* in) {
  return (static_cast<std::uint32_t>(in[0]) << 24) |
         (static_cast<std::uint32_t>(in[1]) << 16) |
         (static_cast<std::uint32_t>(in[2]) << 8) |
         static_cast<std::uint32_t>(in[3]);
}

std::uint64_t load_be64(const std::uint8_t* in) {
  return (static_cast<std::uint64_t>(load_be32(in)) << 32) | load_be32(in + 4);
}

bool contains(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end());
  return it != haystack.end();
}

}  // namespace flipflag
