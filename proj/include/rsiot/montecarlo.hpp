// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "rsiot/contract.hpp"
#include "rsiot/rng.hpp"

namespace rsiot {

struct TamperMcResult {
  std::size_t packet_len = 0;
  std::size_t commit_len = 0;
  std::size_t tampered = 0;
  std::uint64_t trials = 0;
  std::uint64_t detected = 0;
  double rate = 0.0;
  double closed_form = 0.0;  // 1 - (1 - m/l)^n
};

namespace detail {

inline std::uint64_t tamper_trials(std::size_t l, std::size_t n,
                                   std::size_t m, std::uint64_t trials,
                                   std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::uint64_t detected = 0;
  std::vector<std::uint8_t> delta(l);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Bytes packet = rng.bytes(l);
    SelectorSeed sel;
    for (auto& b : sel.bytes)
      b = rng.byte();
    const CoverKey pn{rng.word256()};
    const IndexList indices = select_indices(sel, t, n, l);
    const Bytes commit = extract_bytes(packet, indices);

    // relay-side corruption: m distinct bytes genuinely changed
    std::fill(delta.begin(), delta.end(), 0);
    for (std::size_t placed = 0; placed < m;) {
      const std::size_t pos = rng.below(l);
      if (delta[pos] == 0) {
        delta[pos] = static_cast<std::uint8_t>(1 + rng.below(255));
        ++placed;
      }
    }

    // receiver commitment over the covered, tampered packet; only the
    // selected positions matter, so the cover is evaluated there
    Bytes commit_prime(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t pos = indices[i];
      commit_prime[i] = static_cast<std::uint8_t>(
          (packet[pos] ^ delta[pos]) ^ cover_byte_at(pn, pos));
    }

    if (!RelayContract::verify_delivery(commit, commit_prime, indices, pn))
      ++detected;
  }
  return detected;
}

}  // namespace detail

/// Empirical probability that the delivery check catches a relay which
/// corrupts m of l bytes before covering. Trials are independent and run
/// across hardware threads; the per-thread seeds derive from the master
/// seed, so results are reproducible for a fixed thread count and the
/// reduction is order-independent.
inline TamperMcResult monte_carlo_tamper(std::size_t l, std::size_t n,
                                         std::size_t m, std::uint64_t trials,
                                         std::uint64_t seed) {
  if (l == 0)
    throw std::invalid_argument("tamper mc: packet length must be >= 1");
  if (n == 0)
    throw std::invalid_argument("tamper mc: commitment length must be >= 1");
  if (m > l)
    throw std::invalid_argument("tamper mc: cannot tamper more bytes than l");

  TamperMcResult res;
  res.packet_len = l;
  res.commit_len = n;
  res.tampered = m;
  res.trials = trials;
  res.closed_form = 1.0 - std::pow(1.0 - double(m) / double(l), double(n));
  if (trials == 0)
    return res;

  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(),
                            static_cast<unsigned>(trials)));
  std::vector<std::uint64_t> detected(workers, 0);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t share = trials / workers + (w < trials % workers);
    const std::uint64_t worker_seed =
        derive_seed(seed, "tamper.worker." + std::to_string(w));
    threads.emplace_back([&, w, share, worker_seed] {
      detected[w] = detail::tamper_trials(l, n, m, share, worker_seed);
    });
  }
  for (auto& t : threads)
    t.join();
  for (const auto d : detected)
    res.detected += d;
  res.rate = double(res.detected) / double(trials);
  return res;
}

}  // namespace rsiot
