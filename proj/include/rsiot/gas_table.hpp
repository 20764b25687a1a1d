// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

namespace rsiot {

/// Metered cost model for contract calls. Base costs per operation, plus a
/// per-byte surcharge for the payload-carrying arbitration calls. A call
/// whose total cost exceeds the practical block gas limit is unpostable.
class GasTable {
 public:
  /// Testnet measurements for the fixed-cost operations. The arbitration
  /// calls have no base figure of their own; their cost is dominated by
  /// calldata and storage, modeled here as a flat per-byte rate calibrated
  /// so packets above ~3.5 kB cross the practical ceiling.
  static GasTable defaults() {
    GasTable t;
    t.base_ = {
        {"reg_user.create", 47'000},
        {"reg_user.confirm", 22'000},
        {"reg_server", 40'000},
        {"service_request", 1'800},
        {"service_select", 14'300},
        {"service_confirm", 22'800},
        {"commitment.sender", 151'000},
        {"commitment.receiver", 175'000},
        {"commitment.verify", 40'000},
        {"decommission", 12'000},
        {"execute", 8'000},
        {"reporting", 0},
        {"rebutting", 0},
    };
    t.per_byte_ = {
        {"reporting", 1'000},
        {"rebutting", 1'000},
    };
    return t;
  }

  bool has(const std::string& op) const { return base_.contains(op); }

  std::uint64_t base_cost(const std::string& op) const {
    const auto it = base_.find(op);
    if (it == base_.end())
      throw std::invalid_argument("gas table: unknown operation '" + op + "'");
    return it->second;
  }

  std::uint64_t cost(const std::string& op, std::size_t payload_len) const {
    std::uint64_t c = base_cost(op);
    const auto it = per_byte_.find(op);
    if (it != per_byte_.end())
      c += it->second * static_cast<std::uint64_t>(payload_len);
    return c;
  }

  std::uint64_t block_gas_limit() const { return block_gas_limit_; }
  std::uint64_t gas_price_wei() const { return gas_price_wei_; }
  double ether_usd() const { return ether_usd_; }

  double usd(std::uint64_t gas) const {
    return double(gas) * double(gas_price_wei_) * 1e-18 * ether_usd_;
  }

  void set_base(const std::string& op, std::uint64_t g) { base_[op] = g; }
  void set_per_byte(const std::string& op, std::uint64_t g) {
    per_byte_[op] = g;
  }
  void set_block_gas_limit(std::uint64_t g) { block_gas_limit_ = g; }
  void set_gas_price_wei(std::uint64_t w) { gas_price_wei_ = w; }
  void set_ether_usd(double v) { ether_usd_ = v; }

  /// Load overrides from a line-oriented `key = value` file. Keys:
  ///   base.<op>, per_byte.<op>, block_gas_limit, gas_price_wei, ether_usd.
  /// Lines starting with '#' and blank lines are ignored.
  static GasTable load(std::istream& in) {
    GasTable t = defaults();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#')
        continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("gas table line " + std::to_string(lineno) +
                                    ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key == "block_gas_limit")
        t.block_gas_limit_ = parse_u64(value, lineno);
      else if (key == "gas_price_wei")
        t.gas_price_wei_ = parse_u64(value, lineno);
      else if (key == "ether_usd")
        t.ether_usd_ = std::stod(value);
      else if (key.starts_with("base."))
        t.base_[key.substr(5)] = parse_u64(value, lineno);
      else if (key.starts_with("per_byte."))
        t.per_byte_[key.substr(9)] = parse_u64(value, lineno);
      else
        throw std::invalid_argument("gas table line " + std::to_string(lineno) +
                                    ": unknown key '" + key + "'");
    }
    return t;
  }

  static GasTable load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("cannot open gas table file: " + path);
    return load(in);
  }

  std::string serialize() const {
    std::ostringstream out;
    for (const auto& [op, g] : base_)
      out << "base." << op << " = " << g << "\n";
    for (const auto& [op, g] : per_byte_)
      out << "per_byte." << op << " = " << g << "\n";
    out << "block_gas_limit = " << block_gas_limit_ << "\n";
    out << "gas_price_wei = " << gas_price_wei_ << "\n";
    out << "ether_usd = " << ether_usd_ << "\n";
    return out.str();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
      return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

  static std::uint64_t parse_u64(const std::string& s, std::size_t lineno) {
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(s, &pos);
      if (pos != s.size())
        throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("gas table line " + std::to_string(lineno) +
                                  ": bad integer '" + s + "'");
    }
  }

  std::map<std::string, std::uint64_t> base_;
  std::map<std::string, std::uint64_t> per_byte_;
  std::uint64_t block_gas_limit_ = 3'500'000;
  std::uint64_t gas_price_wei_ = 2'000'000'000;  // 2 Gwei
  double ether_usd_ = 135.0;
};

}  // namespace rsiot
