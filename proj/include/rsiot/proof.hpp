// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "rsiot/selector.hpp"
#include "rsiot/signature.hpp"
#include "rsiot/stream.hpp"

namespace rsiot {

/// A payload plus the sender's recoverable signature over it. Every record
/// crossing a relay channel is one of these; the signature is what later
/// turns a packet into evidence.
struct SignedRecord {
  Bytes payload;
  Signature sig;

  static SignedRecord make(const SecretKey& sk, Bytes payload) {
    SignedRecord r;
    r.sig = sign(sk, payload);
    r.payload = std::move(payload);
    return r;
  }

  Address signer() const { return recover(payload, sig); }
};

// Canonical commitment payload encodings. The contract parses these byte
// layouts when a proof is posted, so both sides must agree on them exactly.
//
//   sender commitment    "RSC1" txn:u64 serial:u64 n:u32 bytes[n]
//   receiver commitment  "RSD1" txn:u64 serial:u64 n:u32 bytes[n] index[n]:u32
//   cover-key reveal     "RSK1" txn:u64 serial:u64 key[32]
//
// All integers big-endian.

struct SenderCommitment {
  std::uint64_t txn = 0;
  std::uint64_t serial = 0;
  Bytes commit;  // B: selected bytes of the uncovered packet
};

struct ReceiverCommitment {
  std::uint64_t txn = 0;
  std::uint64_t serial = 0;
  Bytes commit;       // B': selected bytes of the covered packet
  IndexList indices;  // Ra': the positions the bytes were taken from
};

struct CoverKeyReveal {
  std::uint64_t txn = 0;
  std::uint64_t serial = 0;
  CoverKey key;
};

namespace detail {

inline void append_tag(Bytes& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

inline bool has_tag(ByteView b, const char (&tag)[5]) {
  return b.size() >= 4 && std::equal(tag, tag + 4, b.begin());
}

}  // namespace detail

inline Bytes encode_sender_commitment(const SenderCommitment& c) {
  Bytes out;
  out.reserve(4 + 8 + 8 + 4 + c.commit.size());
  detail::append_tag(out, "RSC1");
  append_u64_be(out, c.txn);
  append_u64_be(out, c.serial);
  append_u32_be(out, static_cast<std::uint32_t>(c.commit.size()));
  out.insert(out.end(), c.commit.begin(), c.commit.end());
  return out;
}

inline std::optional<SenderCommitment> decode_sender_commitment(ByteView b) {
  if (!detail::has_tag(b, "RSC1") || b.size() < 24)
    return std::nullopt;
  SenderCommitment c;
  c.txn = read_u64_be(b, 4);
  c.serial = read_u64_be(b, 12);
  const std::uint32_t n = read_u32_be(b, 20);
  if (b.size() != 24ull + n)
    return std::nullopt;
  c.commit.assign(b.begin() + 24, b.end());
  return c;
}

inline Bytes encode_receiver_commitment(const ReceiverCommitment& c) {
  if (c.commit.size() != c.indices.size())
    throw std::invalid_argument(
        "receiver commitment: bytes and indices must pair up");
  Bytes out;
  out.reserve(4 + 8 + 8 + 4 + c.commit.size() * 5);
  detail::append_tag(out, "RSD1");
  append_u64_be(out, c.txn);
  append_u64_be(out, c.serial);
  append_u32_be(out, static_cast<std::uint32_t>(c.commit.size()));
  out.insert(out.end(), c.commit.begin(), c.commit.end());
  for (const std::uint32_t idx : c.indices)
    append_u32_be(out, idx);
  return out;
}

inline std::optional<ReceiverCommitment> decode_receiver_commitment(
    ByteView b) {
  if (!detail::has_tag(b, "RSD1") || b.size() < 24)
    return std::nullopt;
  ReceiverCommitment c;
  c.txn = read_u64_be(b, 4);
  c.serial = read_u64_be(b, 12);
  const std::uint32_t n = read_u32_be(b, 20);
  if (b.size() != 24ull + std::uint64_t(n) * 5)
    return std::nullopt;
  c.commit.assign(b.begin() + 24, b.begin() + 24 + n);
  c.indices.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i)
    c.indices.push_back(read_u32_be(b, 24 + n + i * 4));
  return c;
}

inline Bytes encode_cover_key_reveal(const CoverKeyReveal& c) {
  Bytes out;
  out.reserve(4 + 8 + 8 + 32);
  detail::append_tag(out, "RSK1");
  append_u64_be(out, c.txn);
  append_u64_be(out, c.serial);
  out.insert(out.end(), c.key.pn.be.begin(), c.key.pn.be.end());
  return out;
}

inline std::optional<CoverKeyReveal> decode_cover_key_reveal(ByteView b) {
  if (!detail::has_tag(b, "RSK1") || b.size() != 52)
    return std::nullopt;
  CoverKeyReveal c;
  c.txn = read_u64_be(b, 4);
  c.serial = read_u64_be(b, 12);
  c.key.pn = Word256::from_bytes(b.subspan(20, 32));
  return c;
}

/// The proof of one delivery: the sender's commitment over the clear packet,
/// the receiver's commitment over the covered packet, and the relay's
/// cover-key reveal, each signed by its author. Verifiable by anyone, on or
/// off the ledger, with identical logic.
struct ProofTriple {
  std::uint64_t txn = 0;
  std::uint64_t serial = 0;
  SignedRecord sender_commit;
  SignedRecord receiver_commit;
  SignedRecord cover_reveal;
};

}  // namespace rsiot
