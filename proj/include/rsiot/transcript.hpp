// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rsiot/ledger.hpp"

namespace rsiot {

/// Append-only run log. Lines carry the ledger's global sequence number so
/// channel messages, contract calls, chain events and gas receipts all
/// interleave in causal order; serialization sorts by that number and is
/// byte-identical across replays of the same scenario.
class Transcript {
 public:
  void add(std::uint64_t seq, std::string text) {
    lines_.emplace_back(seq, std::move(text));
  }

  /// Fold the ledger's own records in before serializing.
  void absorb(const Ledger& ledger) {
    for (const auto& ev : ledger.events())
      add(ev.seq, ev.line());
    for (const auto& r : ledger.receipts())
      add(r.seq, r.line());
  }

  std::string serialize() const {
    std::vector<std::pair<std::uint64_t, std::string>> sorted = lines_;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    std::ostringstream out;
    for (const auto& [seq, text] : sorted)
      out << text << "\n";
    return out.str();
  }

  std::size_t size() const { return lines_.size(); }

 private:
  std::vector<std::pair<std::uint64_t, std::string>> lines_;
};

}  // namespace rsiot
