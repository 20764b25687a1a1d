// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>

#include "rsiot/bytes.hpp"

namespace rsiot {

/// 32-byte Keccak-256 digest. This is the original Keccak (0x01 padding),
/// i.e. the hash exposed as a cheap builtin on common contract platforms,
/// not the later standardized SHA3-256 variant.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const Digest&) const = default;
  std::string hex() const { return to_hex(bytes); }
};

namespace detail {

inline std::uint64_t rotl64(std::uint64_t x, unsigned n) {
  return (x << n) | (x >> (64 - n));
}

// Keccak-f[1600]. State is pulled into locals so the round function runs
// register-resident; the hash-chain stream generator hammers this.
inline void keccak_f1600(std::array<std::uint64_t, 25>& a) {
  static constexpr std::uint64_t kRoundConstants[24] = {
      0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
      0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
      0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
      0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
      0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
      0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
      0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
      0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

  std::uint64_t a00 = a[0], a01 = a[1], a02 = a[2], a03 = a[3], a04 = a[4];
  std::uint64_t a05 = a[5], a06 = a[6], a07 = a[7], a08 = a[8], a09 = a[9];
  std::uint64_t a10 = a[10], a11 = a[11], a12 = a[12], a13 = a[13],
                a14 = a[14];
  std::uint64_t a15 = a[15], a16 = a[16], a17 = a[17], a18 = a[18],
                a19 = a[19];
  std::uint64_t a20 = a[20], a21 = a[21], a22 = a[22], a23 = a[23],
                a24 = a[24];

  for (int round = 0; round < 24; ++round) {
    // theta
    const std::uint64_t c0 = a00 ^ a05 ^ a10 ^ a15 ^ a20;
    const std::uint64_t c1 = a01 ^ a06 ^ a11 ^ a16 ^ a21;
    const std::uint64_t c2 = a02 ^ a07 ^ a12 ^ a17 ^ a22;
    const std::uint64_t c3 = a03 ^ a08 ^ a13 ^ a18 ^ a23;
    const std::uint64_t c4 = a04 ^ a09 ^ a14 ^ a19 ^ a24;
    const std::uint64_t d0 = c4 ^ rotl64(c1, 1);
    const std::uint64_t d1 = c0 ^ rotl64(c2, 1);
    const std::uint64_t d2 = c1 ^ rotl64(c3, 1);
    const std::uint64_t d3 = c2 ^ rotl64(c4, 1);
    const std::uint64_t d4 = c3 ^ rotl64(c0, 1);
    a00 ^= d0; a05 ^= d0; a10 ^= d0; a15 ^= d0; a20 ^= d0;
    a01 ^= d1; a06 ^= d1; a11 ^= d1; a16 ^= d1; a21 ^= d1;
    a02 ^= d2; a07 ^= d2; a12 ^= d2; a17 ^= d2; a22 ^= d2;
    a03 ^= d3; a08 ^= d3; a13 ^= d3; a18 ^= d3; a23 ^= d3;
    a04 ^= d4; a09 ^= d4; a14 ^= d4; a19 ^= d4; a24 ^= d4;

    // rho + pi
    const std::uint64_t b00 = a00;
    const std::uint64_t b10 = rotl64(a01, 1);
    const std::uint64_t b20 = rotl64(a02, 62);
    const std::uint64_t b05 = rotl64(a03, 28);
    const std::uint64_t b15 = rotl64(a04, 27);
    const std::uint64_t b16 = rotl64(a05, 36);
    const std::uint64_t b01 = rotl64(a06, 44);
    const std::uint64_t b11 = rotl64(a07, 6);
    const std::uint64_t b21 = rotl64(a08, 55);
    const std::uint64_t b06 = rotl64(a09, 20);
    const std::uint64_t b07 = rotl64(a10, 3);
    const std::uint64_t b17 = rotl64(a11, 10);
    const std::uint64_t b02 = rotl64(a12, 43);
    const std::uint64_t b12 = rotl64(a13, 25);
    const std::uint64_t b22 = rotl64(a14, 39);
    const std::uint64_t b23 = rotl64(a15, 41);
    const std::uint64_t b08 = rotl64(a16, 45);
    const std::uint64_t b18 = rotl64(a17, 15);
    const std::uint64_t b03 = rotl64(a18, 21);
    const std::uint64_t b13 = rotl64(a19, 8);
    const std::uint64_t b14 = rotl64(a20, 18);
    const std::uint64_t b24 = rotl64(a21, 2);
    const std::uint64_t b09 = rotl64(a22, 61);
    const std::uint64_t b19 = rotl64(a23, 56);
    const std::uint64_t b04 = rotl64(a24, 14);

    // chi + iota
    a00 = b00 ^ (~b01 & b02) ^ kRoundConstants[round];
    a01 = b01 ^ (~b02 & b03);
    a02 = b02 ^ (~b03 & b04);
    a03 = b03 ^ (~b04 & b00);
    a04 = b04 ^ (~b00 & b01);
    a05 = b05 ^ (~b06 & b07);
    a06 = b06 ^ (~b07 & b08);
    a07 = b07 ^ (~b08 & b09);
    a08 = b08 ^ (~b09 & b05);
    a09 = b09 ^ (~b05 & b06);
    a10 = b10 ^ (~b11 & b12);
    a11 = b11 ^ (~b12 & b13);
    a12 = b12 ^ (~b13 & b14);
    a13 = b13 ^ (~b14 & b10);
    a14 = b14 ^ (~b10 & b11);
    a15 = b15 ^ (~b16 & b17);
    a16 = b16 ^ (~b17 & b18);
    a17 = b17 ^ (~b18 & b19);
    a18 = b18 ^ (~b19 & b15);
    a19 = b19 ^ (~b15 & b16);
    a20 = b20 ^ (~b21 & b22);
    a21 = b21 ^ (~b22 & b23);
    a22 = b22 ^ (~b23 & b24);
    a23 = b23 ^ (~b24 & b20);
    a24 = b24 ^ (~b20 & b21);
  }

  a[0] = a00; a[1] = a01; a[2] = a02; a[3] = a03; a[4] = a04;
  a[5] = a05; a[6] = a06; a[7] = a07; a[8] = a08; a[9] = a09;
  a[10] = a10; a[11] = a11; a[12] = a12; a[13] = a13; a[14] = a14;
  a[15] = a15; a[16] = a16; a[17] = a17; a[18] = a18; a[19] = a19;
  a[20] = a20; a[21] = a21; a[22] = a22; a[23] = a23; a[24] = a24;
}

}  // namespace detail

inline Digest keccak256(ByteView data) {
  constexpr std::size_t kRate = 136;  // 1088-bit rate, 512-bit capacity
  std::array<std::uint64_t, 25> state{};

  auto absorb_block = [&state](const std::uint8_t* block) {
    for (std::size_t i = 0; i < kRate / 8; ++i) {
      std::uint64_t lane;
      std::memcpy(&lane, block + i * 8, 8);  // little-endian hosts only
      state[i] ^= lane;
    }
    detail::keccak_f1600(state);
  };

  std::size_t off = 0;
  while (data.size() - off >= kRate) {
    absorb_block(data.data() + off);
    off += kRate;
  }

  // final block: pad10*1 with the 0x01 Keccak domain byte
  std::array<std::uint8_t, kRate> last{};
  if (data.size() > off)
    std::memcpy(last.data(), data.data() + off, data.size() - off);
  last[data.size() - off] = 0x01;
  last[kRate - 1] |= 0x80;
  absorb_block(last.data());

  Digest out;
  std::memcpy(out.bytes.data(), state.data(), 32);
  return out;
}

inline Digest keccak256(std::string_view s) {
  return keccak256(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()),
                            s.size()));
}

}  // namespace rsiot
