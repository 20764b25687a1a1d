// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>

#include "rsiot/keccak.hpp"

namespace rsiot {

/// Pre-shared secret seeding the byte selector. Both user-side endpoints
/// hold the same seed and derive identical index lists per packet serial.
struct SelectorSeed {
  std::array<std::uint8_t, 32> bytes{};

  static SelectorSeed from_seed(std::uint64_t v) {
    SelectorSeed s;
    Bytes input;
    append_u64_be(input, v);
    const std::string_view tag = "rsiot.selector";
    input.insert(input.end(), tag.begin(), tag.end());
    s.bytes = keccak256(input).bytes;
    return s;
  }
};

/// Zero-based byte positions into a packet. Duplicates are legal: the
/// 16-bit draws are reduced mod the packet length and may collide.
using IndexList = std::vector<std::uint32_t>;

/// Derive the n selection indices for one packet. Draw j is the big-endian
/// 16-bit integer from the first two bytes of keccak256(seed || serial ||
/// j), reduced mod the packet length l.
inline IndexList select_indices(const SelectorSeed& seed, std::uint64_t serial,
                                std::size_t n, std::size_t l) {
  if (l == 0)
    throw std::invalid_argument("select_indices: packet length must be >= 1");
  if (n == 0)
    throw std::invalid_argument("select_indices: count must be >= 1");
  Bytes input(seed.bytes.begin(), seed.bytes.end());
  append_u64_be(input, serial);
  const std::size_t draw_off = input.size();
  input.resize(input.size() + 4);

  IndexList out;
  out.reserve(n);
  for (std::uint32_t j = 0; j < n; ++j) {
    input[draw_off] = static_cast<std::uint8_t>(j >> 24);
    input[draw_off + 1] = static_cast<std::uint8_t>(j >> 16);
    input[draw_off + 2] = static_cast<std::uint8_t>(j >> 8);
    input[draw_off + 3] = static_cast<std::uint8_t>(j);
    const Digest d = keccak256(input);
    const std::uint32_t draw = std::uint32_t(d.bytes[0]) << 8 | d.bytes[1];
    out.push_back(draw % static_cast<std::uint32_t>(l));
  }
  return out;
}

/// Pick the committed bytes out of a packet, in index-list order. Repeated
/// indices extract the same byte repeatedly.
inline Bytes extract_bytes(ByteView packet, const IndexList& indices) {
  Bytes out;
  out.reserve(indices.size());
  for (const std::uint32_t idx : indices) {
    if (idx >= packet.size())
      throw std::out_of_range("extract_bytes: index past end of packet");
    out.push_back(packet[idx]);
  }
  return out;
}

}  // namespace rsiot
