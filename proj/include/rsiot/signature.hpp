// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <sodium.h>

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>

#include "rsiot/keccak.hpp"

namespace rsiot {

/// 32-byte signing key. Doubles as the Ed25519 seed.
struct SecretKey {
  std::array<std::uint8_t, 32> bytes{};

  static SecretKey from_u64(std::uint64_t v) {
    SecretKey sk;
    for (int i = 0; i < 8; ++i)
      sk.bytes[31 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return sk;
  }

  bool is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(),
                       [](std::uint8_t b) { return b == 0; });
  }
};

/// 20-byte on-ledger identity: the keccak hash of the public key, truncated
/// to its last 20 bytes.
struct Address {
  std::array<std::uint8_t, 20> bytes{};

  auto operator<=>(const Address&) const = default;
  std::string hex() const { return "0x" + to_hex(bytes); }
};

/// Recoverable signature: the signer's 32-byte public key followed by the
/// 64-byte Ed25519 signature over the message. Recovery re-derives the
/// address from the embedded key, so evidence carries its author with it.
struct Signature {
  static constexpr std::size_t kSize = 96;
  std::array<std::uint8_t, kSize> bytes{};

  auto operator<=>(const Signature&) const = default;

  static std::optional<Signature> from_bytes(ByteView raw) {
    if (raw.size() != kSize)
      return std::nullopt;
    Signature s;
    std::copy(raw.begin(), raw.end(), s.bytes.begin());
    return s;
  }
};

namespace detail {

inline void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0)
    throw std::runtime_error("libsodium initialization failed");
}

struct KeyPair {
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk;
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk;
};

inline KeyPair expand_key(const SecretKey& seed) {
  ensure_sodium();
  if (seed.is_zero())
    throw std::invalid_argument("secret key must be nonzero");
  KeyPair kp;
  crypto_sign_seed_keypair(kp.pk.data(), kp.sk.data(), seed.bytes.data());
  return kp;
}

inline Address address_of_pubkey(ByteView pk) {
  const Digest d = keccak256(pk);
  Address a;
  std::copy(d.bytes.begin() + 12, d.bytes.end(), a.bytes.begin());
  return a;
}

}  // namespace detail

inline Address derive_address(const SecretKey& sk) {
  const auto kp = detail::expand_key(sk);
  return detail::address_of_pubkey(kp.pk);
}

/// Deterministic: the same (key, message) always yields the same bytes,
/// which keeps full-run replays bit-identical.
inline Signature sign(const SecretKey& sk, ByteView message) {
  const auto kp = detail::expand_key(sk);
  Signature sig;
  std::copy(kp.pk.begin(), kp.pk.end(), sig.bytes.begin());
  crypto_sign_detached(sig.bytes.data() + crypto_sign_PUBLICKEYBYTES, nullptr,
                       message.data(), message.size(), kp.sk.data());
  return sig;
}

/// Recovers the signer's address from (message, signature). Total: a
/// signature that fails verification still recovers to a well-defined
/// address, just never the real signer's (except with negligible
/// probability), mirroring how on-chain recovery of tampered evidence
/// yields an unrelated identity rather than an exception.
inline Address recover(ByteView message, const Signature& sig) {
  detail::ensure_sodium();
  const std::uint8_t* pk = sig.bytes.data();
  const std::uint8_t* raw = sig.bytes.data() + crypto_sign_PUBLICKEYBYTES;
  const int rc = crypto_sign_verify_detached(raw, message.data(),
                                             message.size(), pk);
  if (rc == 0)
    return detail::address_of_pubkey(ByteView(pk, crypto_sign_PUBLICKEYBYTES));

  // Diverted identity for non-verifying input: domain-separated hash of the
  // whole evidence tuple.
  Bytes mix;
  mix.reserve(16 + Signature::kSize + 32);
  const std::string_view tag = "rsiot.recover.bad";
  mix.insert(mix.end(), tag.begin(), tag.end());
  mix.insert(mix.end(), sig.bytes.begin(), sig.bytes.end());
  const Digest mh = keccak256(message);
  mix.insert(mix.end(), mh.bytes.begin(), mh.bytes.end());
  return detail::address_of_pubkey(keccak256(mix).bytes);
}

inline bool verifies(ByteView message, const Signature& sig,
                     const Address& expected) {
  return recover(message, sig) == expected;
}

}  // namespace rsiot
