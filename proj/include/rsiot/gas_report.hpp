// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "rsiot/gas_table.hpp"

namespace rsiot {

/// Per-operation and per-actor gas totals, aggregated from the `gas` lines
/// of a serialized transcript.
struct GasSummary {
  struct OpRow {
    std::uint64_t calls = 0;
    std::uint64_t gas = 0;
  };
  std::map<std::string, OpRow> by_op;
  std::map<std::string, std::uint64_t> by_actor;
  std::uint64_t total_gas = 0;
  std::uint64_t lines_parsed = 0;
};

namespace detail {

inline std::map<std::string, std::string> parse_kv(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos)
      kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

}  // namespace detail

inline GasSummary summarize_gas(std::istream& transcript) {
  GasSummary sum;
  std::string line;
  while (std::getline(transcript, line)) {
    if (!line.starts_with("gas "))
      continue;
    const auto kv = detail::parse_kv(line);
    const auto op = kv.find("op");
    const auto amount = kv.find("amount");
    const auto actor = kv.find("actor");
    if (op == kv.end() || amount == kv.end())
      continue;
    const std::uint64_t gas = std::stoull(amount->second);
    auto& row = sum.by_op[op->second];
    ++row.calls;
    row.gas += gas;
    if (actor != kv.end())
      sum.by_actor[actor->second] += gas;
    sum.total_gas += gas;
    ++sum.lines_parsed;
  }
  return sum;
}

/// Plain-text table with the currency conversion at the configured gas
/// price and exchange rate.
inline std::string format_gas_report(const GasSummary& sum,
                                     const GasTable& table) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << std::left << std::setw(28) << "operation" << std::right
      << std::setw(8) << "calls" << std::setw(14) << "gas" << std::setw(12)
      << "usd"
      << "\n";
  for (const auto& [op, row] : sum.by_op) {
    out << std::left << std::setw(28) << op << std::right << std::setw(8)
        << row.calls << std::setw(14) << row.gas << std::setw(12)
        << table.usd(row.gas) << "\n";
  }
  out << std::left << std::setw(28) << "total" << std::right << std::setw(8)
      << sum.lines_parsed << std::setw(14) << sum.total_gas << std::setw(12)
      << table.usd(sum.total_gas) << "\n\n";
  out << std::left << std::setw(46) << "actor" << std::right << std::setw(14)
      << "gas" << std::setw(12) << "usd"
      << "\n";
  for (const auto& [actor, gas] : sum.by_actor) {
    out << std::left << std::setw(46) << actor << std::right << std::setw(14)
        << gas << std::setw(12) << table.usd(gas) << "\n";
  }
  out << "\ngas_price_wei=" << table.gas_price_wei()
      << " ether_usd=" << table.ether_usd() << "\n";
  return out.str();
}

}  // namespace rsiot
