// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "rsiot/rng.hpp"
#include "rsiot/selector.hpp"
#include "rsiot/signature.hpp"
#include "rsiot/stream.hpp"

using namespace rsiot;

namespace {

// Independent Keccak-256 oracle: textbook 5x5 lane matrix with table-driven
// rho/pi, deliberately sharing no code or structure with the production
// implementation.
namespace oracle {

constexpr std::uint64_t kRc[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};
constexpr unsigned kRot[5][5] = {{0, 36, 3, 41, 18},
                                 {1, 44, 10, 45, 2},
                                 {62, 6, 43, 15, 61},
                                 {28, 55, 25, 21, 56},
                                 {27, 20, 39, 8, 14}};

std::uint64_t rot(std::uint64_t v, unsigned n) {
  n %= 64;
  return n == 0 ? v : (v << n) | (v >> (64 - n));
}

void permute(std::uint64_t a[5][5]) {
  for (int round = 0; round < 24; ++round) {
    std::uint64_t c[5], d[5], b[5][5];
    for (int x = 0; x < 5; ++x)
      c[x] = a[x][0] ^ a[x][1] ^ a[x][2] ^ a[x][3] ^ a[x][4];
    for (int x = 0; x < 5; ++x)
      d[x] = c[(x + 4) % 5] ^ rot(c[(x + 1) % 5], 1);
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        a[x][y] ^= d[x];
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        b[y][(2 * x + 3 * y) % 5] = rot(a[x][y], kRot[x][y]);
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y)
        a[x][y] = b[x][y] ^ (~b[(x + 1) % 5][y] & b[(x + 2) % 5][y]);
    a[0][0] ^= kRc[round];
  }
}

Bytes keccak256(ByteView data) {
  constexpr std::size_t rate = 136;
  Bytes padded(data.begin(), data.end());
  padded.push_back(0x01);
  while (padded.size() % rate != 0)
    padded.push_back(0x00);
  padded[padded.size() - 1] ^= 0x80;

  std::uint64_t a[5][5] = {};
  for (std::size_t off = 0; off < padded.size(); off += rate) {
    for (std::size_t i = 0; i < rate / 8; ++i) {
      std::uint64_t lane = 0;
      for (int k = 7; k >= 0; --k)
        lane = lane << 8 | padded[off + i * 8 + k];
      a[i % 5][i / 5] ^= lane;
    }
    permute(a);
  }
  Bytes out(32);
  for (std::size_t i = 0; i < 4; ++i)
    for (int k = 0; k < 8; ++k)
      out[i * 8 + k] = static_cast<std::uint8_t>(a[i % 5][i / 5] >> (8 * k));
  return out;
}

}  // namespace oracle

std::string data_dir() {
  const char* env = std::getenv("RSIOT_DATA_DIR");
  return env ? env : "data";
}

}  // namespace

TEST_CASE("keccak matches the reference empty-input digest") {
  CHECK(keccak256(std::string_view("")).hex() ==
        "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
  CHECK(keccak256(std::string_view("abc")).hex() ==
        "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
}

TEST_CASE("keccak agrees with an independent implementation") {
  SplitMix64 rng(101);
  for (int i = 0; i < 400; ++i) {
    // lengths straddling the 136-byte rate boundary matter most
    const std::size_t len = rng.below(300);
    const Bytes input = rng.bytes(len);
    const Digest got = keccak256(input);
    const Bytes want = oracle::keccak256(input);
    REQUIRE(Bytes(got.bytes.begin(), got.bytes.end()) == want);
  }
}

TEST_CASE("keccak is deterministic and bit-flips change the digest") {
  SplitMix64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    Bytes input = rng.bytes(1 + rng.below(64));
    const Digest d1 = keccak256(input);
    CHECK(keccak256(input) == d1);
    Bytes flipped = input;
    flipped[rng.below(flipped.size())] ^=
        static_cast<std::uint8_t>(1u << rng.below(8));
    REQUIRE(keccak256(flipped) != d1);
  }
}

TEST_CASE("addresses are stable and distinct") {
  const SecretKey sk = SecretKey::from_u64(12345);
  CHECK(derive_address(sk) == derive_address(sk));

  SplitMix64 rng(8);
  std::set<Address> seen;
  for (int i = 0; i < 200; ++i) {
    SecretKey k;
    do {
      for (auto& b : k.bytes)
        b = rng.byte();
    } while (k.is_zero());
    seen.insert(derive_address(k));
  }
  CHECK(seen.size() == 200);

  CHECK_THROWS_AS(derive_address(SecretKey{}), std::invalid_argument);
}

TEST_CASE("sign/recover round-trips and rejects tampering") {
  SplitMix64 rng(9);
  int trials = 200;
  for (int i = 0; i < trials; ++i) {
    SecretKey sk = SecretKey::from_u64(1 + rng.next());
    const Bytes msg = rng.bytes(1 + rng.below(128));
    const Signature sig = sign(sk, msg);
    const Address addr = derive_address(sk);
    REQUIRE(recover(msg, sig) == addr);

    // deterministic signatures
    CHECK(sign(sk, msg) == sig);

    Bytes tampered_msg = msg;
    tampered_msg[rng.below(msg.size())] ^=
        static_cast<std::uint8_t>(1u << rng.below(8));
    REQUIRE(recover(tampered_msg, sig) != addr);

    Signature tampered_sig = sig;
    tampered_sig.bytes[rng.below(Signature::kSize)] ^=
        static_cast<std::uint8_t>(1u << rng.below(8));
    REQUIRE(recover(msg, tampered_sig) != addr);
  }

  CHECK(!Signature::from_bytes(Bytes(95)).has_value());
  CHECK(Signature::from_bytes(Bytes(96)).has_value());
}

TEST_CASE("cover stream definition and random access") {
  SplitMix64 rng(10);
  const CoverKey pn{rng.word256()};

  SECTION("position zero is the first byte of hash(PN)") {
    CHECK(cover_byte_at(pn, 0) ==
          keccak256(ByteView(pn.pn.be)).bytes[0]);
  }

  SECTION("cover_byte_at equals the full stream at that position") {
    for (int i = 0; i < 50; ++i) {
      const std::uint64_t k = rng.below(4096);
      const Bytes stream = cover_stream(pn, 0, k + 1);
      REQUIRE(cover_byte_at(pn, k) == stream[k]);
    }
  }

  SECTION("slices agree with the prefix stream") {
    const Bytes full = cover_stream(pn, 0, 512);
    for (int i = 0; i < 30; ++i) {
      const std::uint64_t off = rng.below(500);
      const std::size_t len = rng.below(512 - off);
      const Bytes slice = cover_stream(pn, off, len);
      REQUIRE(Bytes(full.begin() + off, full.begin() + off + len) == slice);
    }
  }

  SECTION("zero length yields empty") {
    CHECK(cover_stream(pn, 0, 0).empty());
  }

  SECTION("distinct keys give distinct first bytes almost always") {
    int distinct = 0;
    for (int i = 0; i < 1000; ++i) {
      const CoverKey a{rng.word256()}, b{rng.word256()};
      if (cover_byte_at(a, 0) != cover_byte_at(b, 0))
        ++distinct;
    }
    // one-byte comparison collides at 1/256 per pair; 5 sigma below the
    // expected 996 distinct is 986
    CHECK(distinct >= 986);
  }
}

TEST_CASE("stream position p consumes exactly hash(PN + p)") {
  // counting oracle: recompute the chain by hand, one hash per byte
  SplitMix64 rng(11);
  const CoverKey pn{rng.word256()};
  const std::size_t n = 300;
  const Bytes stream = cover_stream(pn, 0, n);
  std::size_t hashes_consumed = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const Word256 input = pn.pn.plus(p);
    const Digest d = keccak256(ByteView(input.be));
    ++hashes_consumed;
    REQUIRE(stream[p] == d.bytes[0]);
  }
  CHECK(hashes_consumed == n);
}

TEST_CASE("counter arithmetic wraps modulo 2^256") {
  CoverKey max;
  for (auto& b : max.pn.be)
    b = 0xff;
  const CoverKey zero = CoverKey::from_u64(0);
  CHECK(cover_byte_at(max, 1) == cover_byte_at(zero, 0));
  CHECK(cover_byte_at(max, 5) == cover_byte_at(zero, 4));
}

TEST_CASE("apply_cover is an involution that preserves length") {
  SplitMix64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const CoverKey pn{rng.word256()};
    const Bytes packet = rng.bytes(rng.below(600));
    const Bytes covered = apply_cover(packet, pn);
    REQUIRE(covered.size() == packet.size());
    REQUIRE(apply_cover(covered, pn) == packet);
  }
  const CoverKey pn{rng.word256()};
  const Bytes zeros(64, 0);
  CHECK(apply_cover(zeros, pn) == cover_stream(pn, 0, 64));
}

TEST_CASE("selector is deterministic, in range, and mod-1 collapses") {
  const SelectorSeed seed = SelectorSeed::from_seed(77);

  SECTION("l = 1 pins every index to zero") {
    for (const std::uint32_t idx : select_indices(seed, 9, 16, 1))
      REQUIRE(idx == 0);
  }

  SECTION("same inputs, same list") {
    CHECK(select_indices(seed, 5, 32, 1000) ==
          select_indices(seed, 5, 32, 1000));
    CHECK(select_indices(seed, 5, 32, 1000) !=
          select_indices(seed, 6, 32, 1000));
  }

  SECTION("every index below l for random l") {
    SplitMix64 rng(13);
    for (int i = 0; i < 200; ++i) {
      const std::size_t l = 1 + rng.below(65536);
      for (const std::uint32_t idx :
           select_indices(seed, rng.next(), 1 + rng.below(64), l))
        REQUIRE(idx < l);
    }
  }

  SECTION("degenerate sizes are refused") {
    CHECK_THROWS_AS(select_indices(seed, 1, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(select_indices(seed, 1, 0, 10), std::invalid_argument);
  }
}

TEST_CASE("selector draws are uniform within 5 sigma") {
  const SelectorSeed seed = SelectorSeed::from_seed(4242);
  constexpr std::size_t l = 256, n = 32;
  constexpr std::uint64_t serials = 10000;
  std::vector<std::uint64_t> freq(l, 0);
  for (std::uint64_t s = 0; s < serials; ++s)
    for (const std::uint32_t idx : select_indices(seed, s, n, l))
      ++freq[idx];
  const double draws = double(serials) * n;
  const double expected = draws / l;
  const double sigma = std::sqrt(draws * (1.0 / l) * (1.0 - 1.0 / l));
  for (std::size_t i = 0; i < l; ++i)
    REQUIRE(std::abs(double(freq[i]) - expected) <= 5.0 * sigma);
}

TEST_CASE("selector draws are 16-bit values reduced mod l") {
  // recompute the construction from the hash directly
  const SelectorSeed seed = SelectorSeed::from_seed(3);
  const std::uint64_t serial = 11;
  const std::size_t n = 16, l = 70000;  // l above 2^16: raw draws visible
  const IndexList got = select_indices(seed, serial, n, l);
  for (std::uint32_t j = 0; j < n; ++j) {
    Bytes input(seed.bytes.begin(), seed.bytes.end());
    append_u64_be(input, serial);
    append_u32_be(input, j);
    const Digest d = keccak256(input);
    const std::uint32_t raw = std::uint32_t(d.bytes[0]) << 8 | d.bytes[1];
    REQUIRE(got[j] == raw % l);
    REQUIRE(got[j] < 65536);
  }
}

TEST_CASE("extract_bytes follows the index list exactly") {
  const Bytes packet{10, 20, 30};
  CHECK(extract_bytes(packet, {2, 0, 2}) == Bytes{30, 10, 30});
  CHECK(extract_bytes(packet, {0, 0, 0, 0}) == Bytes{10, 10, 10, 10});
  CHECK_THROWS_AS(extract_bytes(packet, {3}), std::out_of_range);
}

TEST_CASE("extraction commutes with covering") {
  // extract(cover(p))[i] xor extract(p)[i] == cover byte at the index
  SplitMix64 rng(14);
  for (int t = 0; t < 100; ++t) {
    const std::size_t l = 1 + rng.below(400);
    const Bytes packet = rng.bytes(l);
    const CoverKey pn{rng.word256()};
    const SelectorSeed seed = SelectorSeed::from_seed(rng.next());
    const IndexList ra = select_indices(seed, t, 32, l);
    const Bytes covered = apply_cover(packet, pn);
    const Bytes a = extract_bytes(covered, ra);
    const Bytes b = extract_bytes(packet, ra);
    for (std::size_t i = 0; i < ra.size(); ++i)
      REQUIRE(static_cast<std::uint8_t>(a[i] ^ b[i]) ==
              cover_byte_at(pn, ra[i]));
  }
}

TEST_CASE("stream cipher round-trips and separates serials") {
  SplitMix64 rng(15);
  const EncryptionKey k = EncryptionKey::from_seed(rng.next());

  CHECK(stream_encrypt(k, 3, Bytes{}).empty());

  for (int i = 0; i < 50; ++i) {
    const std::uint64_t serial = rng.next();
    const Bytes msg = rng.bytes(1 + rng.below(300));
    const Bytes ct = stream_encrypt(k, serial, msg);
    REQUIRE(ct.size() == msg.size());
    REQUIRE(stream_decrypt(k, serial, ct) == msg);
  }

  int differing = 0;
  for (int i = 0; i < 100; ++i) {
    const Bytes msg = rng.bytes(32);
    if (stream_encrypt(k, 2 * i, msg) != stream_encrypt(k, 2 * i + 1, msg))
      ++differing;
  }
  CHECK(differing == 100);
}

TEST_CASE("signature soundness over 1000 randomized trials") {
  SplitMix64 rng(16);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const SecretKey sk = SecretKey::from_u64(1 + rng.next());
    const Bytes msg = rng.bytes(1 + rng.below(64));
    const Signature sig = sign(sk, msg);
    const Address addr = derive_address(sk);
    if (recover(msg, sig) != addr)
      ++failures;
    Bytes m2 = msg;
    m2[rng.below(m2.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    if (recover(m2, sig) == addr)
      ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("golden vectors") {
  std::ifstream in(data_dir() + "/golden_vectors.txt");
  REQUIRE(in.good());
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "hash") {
      std::string input_hex, want;
      ls >> input_hex >> want;
      const Bytes input = input_hex == "-" ? Bytes{} : from_hex(input_hex);
      REQUIRE(keccak256(input).hex() == want);
    } else if (kind == "cover") {
      std::string pn_hex, want;
      std::uint64_t off;
      std::size_t len;
      ls >> pn_hex >> off >> len >> want;
      const CoverKey pn{Word256::from_bytes(from_hex(pn_hex))};
      REQUIRE(to_hex(cover_stream(pn, off, len)) == want);
    } else if (kind == "select") {
      std::string seed_hex, csv;
      std::uint64_t serial;
      std::size_t n, l;
      ls >> seed_hex >> serial >> n >> l >> csv;
      SelectorSeed seed;
      const Bytes sb = from_hex(seed_hex);
      std::copy(sb.begin(), sb.end(), seed.bytes.begin());
      IndexList want;
      std::istringstream cs(csv);
      std::string tok;
      while (std::getline(cs, tok, ','))
        want.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
      REQUIRE(select_indices(seed, serial, n, l) == want);
    } else if (kind == "encrypt") {
      std::string key_hex, msg_hex, want;
      std::uint64_t serial;
      ls >> key_hex >> serial >> msg_hex >> want;
      EncryptionKey k;
      const Bytes kb = from_hex(key_hex);
      std::copy(kb.begin(), kb.end(), k.bytes.begin());
      REQUIRE(to_hex(stream_encrypt(k, serial, from_hex(msg_hex))) == want);
    } else {
      FAIL("unknown golden vector kind: " << kind);
    }
    ++checked;
  }
  CHECK(checked >= 15);
}
