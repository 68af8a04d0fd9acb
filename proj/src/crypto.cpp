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

#include "flipflag/crypto.hpp"

#include <sodium.h>

#include <cassert>
#include <cstring>
#include <stdexcept>

namespace flipflag::crypto {

namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("sodium_init failed");
}

bool g_skip_integrity_checks = false;

Digest hash_fields_view(std::span<const ByteView> fields) {
  ensure_sodium();
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  std::uint8_t len[4];
  for (const auto& f : fields) {
    store_be32(len, static_cast<std::uint32_t>(f.size()));
    crypto_hash_sha256_update(&st, len, sizeof(len));
    crypto_hash_sha256_update(&st, f.data(), f.size());
  }
  Digest out{};
  crypto_hash_sha256_final(&st, out.data());
  return out;
}

}  // namespace

Digest hash_fields(std::initializer_list<ByteView> fields) {
  assert(fields.size() > 0);
  return hash_fields_view({fields.begin(), fields.size()});
}

Bytes mex(ByteView secret, const Nonce& nonce, std::size_t n) {
  Bytes out;
  out.reserve(n);
  std::uint8_t ctr[4];
  for (std::uint32_t block = 0; out.size() < n; ++block) {
    store_be32(ctr, block);
    Digest d = hash_fields({secret, nonce, ByteView(ctr, 4)});
    std::size_t take = std::min<std::size_t>(kHashLen, n - out.size());
    out.insert(out.end(), d.begin(), d.begin() + take);
  }
  return out;
}

Bytes apply_mask(ByteView secret, const Nonce& nonce, ByteView data) {
  Bytes pad = mex(secret, nonce, data.size());
  for (std::size_t i = 0; i < data.size(); ++i) pad[i] ^= data[i];
  return pad;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::uint8_t ctr[8];
  std::size_t pos = 0;
  while (pos < out.size()) {
    store_be64(ctr, counter_++);
    Digest d = hash_fields({key_, ByteView(ctr, 8)});
    std::size_t take = std::min<std::size_t>(kHashLen, out.size() - pos);
    std::memcpy(out.data() + pos, d.data(), take);
    pos += take;
  }
}

Bytes Rng::next(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

Nonce Rng::nonce() {
  Nonce out{};
  fill(out);
  return out;
}

Seed Rng::seed() {
  Seed out{};
  fill(out);
  return out;
}

Rng Rng::fork(std::string_view label) const {
  return Rng(hash_fields({key_, as_bytes("fork"), as_bytes(label)}));
}

ServerKeyPair ServerKeyPair::generate(Rng& rng) {
  ensure_sodium();
  ServerKeyPair kp;
  Seed box_seed = rng.seed();
  crypto_box_seed_keypair(kp.box.pk.data(), kp.box.sk.data(), box_seed.data());
  Seed sig_seed = rng.seed();
  crypto_sign_seed_keypair(kp.sig.pk.data(), kp.sig.sk.data(), sig_seed.data());
  return kp;
}

EncryptedKey pke_encrypt(const std::array<std::uint8_t, 32>& pk, const SecretKey& key, Rng& rng) {
  ensure_sodium();
  static_assert(kSealedKeyLen == crypto_box_SEALBYTES + kKeyLen);

  // Sealed-box construction with an explicit ephemeral seed so the
  // ciphertext is a pure function of (pk, key, rng state). The layout and
  // nonce derivation match crypto_box_seal, so crypto_box_seal_open
  // decrypts it.
  std::array<std::uint8_t, 32> epk{};
  std::array<std::uint8_t, 32> esk{};
  Seed eph_seed = rng.seed();
  crypto_box_seed_keypair(epk.data(), esk.data(), eph_seed.data());

  std::array<std::uint8_t, crypto_box_NONCEBYTES> nonce{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, nonce.size());
  crypto_generichash_update(&st, epk.data(), epk.size());
  crypto_generichash_update(&st, pk.data(), pk.size());
  crypto_generichash_final(&st, nonce.data(), nonce.size());

  EncryptedKey out{};
  std::memcpy(out.data(), epk.data(), epk.size());
  if (crypto_box_easy(out.data() + epk.size(), key.data(), key.size(), nonce.data(), pk.data(),
                      esk.data()) != 0) {
    throw std::runtime_error("crypto_box_easy failed");
  }
  return out;
}

Outcome<SecretKey> pke_decrypt(const BoxKeyPair& keys, const EncryptedKey& ct) {
  ensure_sodium();
  SecretKey out{};
  if (crypto_box_seal_open(out.data(), ct.data(), ct.size(), keys.pk.data(), keys.sk.data()) !=
      0) {
    return ProtoError::DecryptError;
  }
  return out;
}

Signature sign_receipt(const SignKeyPair& keys, ByteView body) {
  ensure_sodium();
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, body.data(), body.size(), keys.sk.data());
  return sig;
}

bool verify_receipt(const std::array<std::uint8_t, 32>& sig_pk, ByteView body,
                    const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), body.data(), body.size(), sig_pk.data()) == 0;
}

void set_insecure_skip_integrity_checks(bool skip) { g_skip_integrity_checks = skip; }

bool integrity_checks_enabled() { return !g_skip_integrity_checks; }

bool integrity_ok(const Digest& got, const Digest& want) {
  if (g_skip_integrity_checks) return true;
  return sodium_memcmp(got.data(), want.data(), got.size()) == 0;
}

}  // namespace flipflag::crypto
