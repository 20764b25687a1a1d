// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>

#include "rsiot/bytes.hpp"

namespace rsiot {

/// 256-bit unsigned integer, stored big-endian. Only the arithmetic the
/// hash-chain stream needs: addition of a 64-bit counter, wrapping mod 2^256.
struct Word256 {
  std::array<std::uint8_t, 32> be{};

  auto operator<=>(const Word256&) const = default;

  static Word256 from_u64(std::uint64_t v) {
    Word256 w;
    for (int i = 0; i < 8; ++i)
      w.be[31 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return w;
  }

  static Word256 from_bytes(ByteView b) {
    if (b.size() != 32)
      throw std::invalid_argument("Word256: need exactly 32 bytes");
    Word256 w;
    for (std::size_t i = 0; i < 32; ++i)
      w.be[i] = b[i];
    return w;
  }

  Word256 plus(std::uint64_t k) const {
    Word256 out = *this;
    std::uint32_t carry = 0;
    for (int i = 31; i >= 0 && (k != 0 || carry != 0); --i) {
      const std::uint32_t sum =
          std::uint32_t(out.be[i]) + std::uint32_t(k & 0xff) + carry;
      out.be[i] = static_cast<std::uint8_t>(sum);
      carry = sum >> 8;
      k >>= 8;
    }
    return out;  // overflow past byte 0 wraps mod 2^256
  }

  std::string hex() const { return to_hex(be); }
};

}  // namespace rsiot
