// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>

#include "rsiot/keccak.hpp"
#include "rsiot/word256.hpp"

namespace rsiot {

/// Small deterministic generator for simulation randomness (payload bytes,
/// cover keys, adversarial tampering positions). Not part of the protocol
/// itself; chosen so transcripts replay bit-identically on any platform,
/// which std:: distributions do not guarantee.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    // rejection sampling: unbiased and deterministic
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

  std::uint8_t byte() { return static_cast<std::uint8_t>(next()); }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (auto& b : out)
      b = byte();
    return out;
  }

  Word256 word256() {
    Word256 w;
    for (auto& b : w.be)
      b = byte();
    return w;
  }
};

/// Label-separated sub-seed derivation, so independent components of a run
/// never share a generator stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  Bytes input;
  append_u64_be(input, master);
  input.insert(input.end(), label.begin(), label.end());
  const Digest d = keccak256(input);
  return read_u64_be(d.bytes, 0);
}

}  // namespace rsiot
