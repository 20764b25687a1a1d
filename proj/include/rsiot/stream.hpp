// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>

#include "rsiot/keccak.hpp"
#include "rsiot/rng.hpp"
#include "rsiot/word256.hpp"

namespace rsiot {

// Hash-chain key stream: byte p of the stream keyed by a 256-bit word W is
// the first byte of keccak256(W + p). One hash per stream byte, so any
// position is addressable without generating the prefix.

namespace detail {

inline std::uint8_t chain_byte(const Word256& key, std::uint64_t pos) {
  return keccak256(ByteView(key.plus(pos).be)).bytes[0];
}

inline Bytes chain_stream(const Word256& key, std::uint64_t offset,
                          std::size_t len) {
  Bytes out(len);
  for (std::size_t i = 0; i < len; ++i)
    out[i] = chain_byte(key, offset + i);
  return out;
}

}  // namespace detail

/// Secret key of the relay-side cover stream. Counter addition wraps mod
/// 2^256 like the on-chain word arithmetic it models.
struct CoverKey {
  Word256 pn;

  auto operator<=>(const CoverKey&) const = default;

  static CoverKey from_u64(std::uint64_t v) { return {Word256::from_u64(v)}; }
  static CoverKey random(SplitMix64& rng) { return {rng.word256()}; }
  std::string hex() const { return pn.hex(); }
};

/// Byte at zero-based position `pos` of the cover stream.
inline std::uint8_t cover_byte_at(const CoverKey& key, std::uint64_t pos) {
  return detail::chain_byte(key.pn, pos);
}

/// Bytes [offset, offset+len) of the cover stream.
inline Bytes cover_stream(const CoverKey& key, std::uint64_t offset,
                          std::size_t len) {
  return detail::chain_stream(key.pn, offset, len);
}

/// XOR the packet against the cover stream from position 0. Involution:
/// applying it twice with the same key restores the input.
inline Bytes apply_cover(ByteView packet, const CoverKey& key) {
  Bytes out(packet.begin(), packet.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] ^= cover_byte_at(key, i);
  return out;
}

/// Long-term symmetric key shared by the two user-side endpoints.
struct EncryptionKey {
  std::array<std::uint8_t, 32> bytes{};

  static EncryptionKey from_seed(std::uint64_t v) {
    EncryptionKey k;
    const Word256 w = Word256::from_u64(v);
    k.bytes = keccak256(ByteView(w.be)).bytes;
    return k;
  }
};

namespace detail {

inline Word256 packet_key(const EncryptionKey& k, std::uint64_t serial) {
  Bytes input(k.bytes.begin(), k.bytes.end());
  append_u64_be(input, serial);
  return Word256{keccak256(input).bytes};
}

}  // namespace detail

/// Per-packet stream encryption: the same hash-chain construction as the
/// cover stream, keyed by keccak256(key || serial). Confidentiality only;
/// integrity comes from the record signatures and the commitments.
inline Bytes stream_encrypt(const EncryptionKey& k, std::uint64_t serial,
                            ByteView msg) {
  const Word256 pk = detail::packet_key(k, serial);
  Bytes out(msg.begin(), msg.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] ^= detail::chain_byte(pk, i);
  return out;
}

inline Bytes stream_decrypt(const EncryptionKey& k, std::uint64_t serial,
                            ByteView ciphertext) {
  return stream_encrypt(k, serial, ciphertext);  // XOR stream is its own inverse
}

}  // namespace rsiot
