// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rsiot/gas_table.hpp"
#include "rsiot/signature.hpp"

namespace rsiot {

enum class LedgerErrorCode {
  DuplicateAccount,
  UnknownAccount,
  InsufficientBalance,
  UnknownGasOp,
  GasLimitExceeded,
};

class LedgerError : public std::runtime_error {
 public:
  LedgerError(LedgerErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  LedgerErrorCode code() const { return code_; }

 private:
  LedgerErrorCode code_;
};

struct LedgerEvent {
  std::uint64_t seq = 0;
  std::uint64_t height = 0;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> payload;

  std::string line() const {
    std::ostringstream out;
    out << "event seq=" << seq << " height=" << height << " kind=" << kind;
    for (const auto& [k, v] : payload)
      out << " " << k << "=" << v;
    return out.str();
  }
};

struct GasReceipt {
  std::uint64_t seq = 0;
  std::uint64_t height = 0;
  Address actor;
  std::string op;
  std::size_t payload_len = 0;
  std::uint64_t gas = 0;

  std::string line() const {
    std::ostringstream out;
    out << "gas seq=" << seq << " height=" << height << " actor=" << actor.hex()
        << " op=" << op << " payload=" << payload_len << " amount=" << gas;
    return out.str();
  }
};

/// Deterministic in-process stand-in for the public chain: accounts and
/// balances, an explicit block clock, an append-only event log, and a gas
/// meter. Single writer — every mutation flows through one serialized
/// command stream owned by the harness; reads may happen from anywhere.
class Ledger {
 public:
  explicit Ledger(GasTable gas = GasTable::defaults())
      : gas_(std::move(gas)) {}

  // --- accounts --------------------------------------------------------

  void create_account(const Address& addr) {
    if (balances_.contains(addr))
      throw LedgerError(LedgerErrorCode::DuplicateAccount,
                        "account already exists: " + addr.hex());
    balances_[addr] = 0;
  }

  bool has_account(const Address& addr) const {
    return balances_.contains(addr);
  }

  std::uint64_t balance(const Address& addr) const {
    const auto it = balances_.find(addr);
    if (it == balances_.end())
      throw LedgerError(LedgerErrorCode::UnknownAccount,
                        "unknown account: " + addr.hex());
    return it->second;
  }

  std::uint64_t mint(const Address& addr, std::uint64_t amount) {
    auto it = balances_.find(addr);
    if (it == balances_.end())
      throw LedgerError(LedgerErrorCode::UnknownAccount,
                        "unknown account: " + addr.hex());
    it->second += amount;
    minted_ += amount;
    return it->second;
  }

  void transfer(const Address& from, const Address& to, std::uint64_t amount) {
    auto fit = balances_.find(from);
    auto tit = balances_.find(to);
    if (fit == balances_.end() || tit == balances_.end())
      throw LedgerError(LedgerErrorCode::UnknownAccount,
                        "transfer with unknown account");
    if (fit->second < amount)
      throw LedgerError(LedgerErrorCode::InsufficientBalance,
                        "insufficient balance in " + from.hex());
    fit->second -= amount;
    tit->second += amount;
  }

  std::uint64_t total_minted() const { return minted_; }

  std::uint64_t total_balance() const {
    std::uint64_t sum = 0;
    for (const auto& [addr, bal] : balances_)
      sum += bal;
    return sum;
  }

  const std::map<Address, std::uint64_t>& balances() const {
    return balances_;
  }

  // --- block clock -----------------------------------------------------

  std::uint64_t height() const { return height_; }

  std::uint64_t advance_blocks(std::uint64_t n) {
    height_ += n;
    return height_;
  }

  // --- events ----------------------------------------------------------

  std::uint64_t next_seq() { return seq_++; }

  const LedgerEvent& emit_event(
      std::string kind,
      std::vector<std::pair<std::string, std::string>> payload) {
    LedgerEvent ev;
    ev.seq = next_seq();
    ev.height = height_;
    ev.kind = std::move(kind);
    ev.payload = std::move(payload);
    events_.push_back(std::move(ev));
    return events_.back();
  }

  const std::vector<LedgerEvent>& events() const { return events_; }

  // --- gas metering ----------------------------------------------------

  const GasTable& gas_table() const { return gas_; }

  /// Charge `actor` for one posted call. Throws GasLimitExceeded (and
  /// records nothing) when the cost would not fit in a block — the
  /// transaction is unpostable rather than merely failed.
  const GasReceipt& charge_gas(const Address& actor, const std::string& op,
                               std::size_t payload_len = 0) {
    std::uint64_t cost = 0;
    try {
      cost = gas_.cost(op, payload_len);
    } catch (const std::invalid_argument& e) {
      throw LedgerError(LedgerErrorCode::UnknownGasOp, e.what());
    }
    if (cost > gas_.block_gas_limit())
      throw LedgerError(LedgerErrorCode::GasLimitExceeded,
                        "gas cost " + std::to_string(cost) + " for '" + op +
                            "' exceeds block gas limit " +
                            std::to_string(gas_.block_gas_limit()));
    GasReceipt r;
    r.seq = next_seq();
    r.height = height_;
    r.actor = actor;
    r.op = op;
    r.payload_len = payload_len;
    r.gas = cost;
    receipts_.push_back(r);
    gas_by_actor_[actor] += cost;
    gas_total_ += cost;
    return receipts_.back();
  }

  const std::vector<GasReceipt>& receipts() const { return receipts_; }
  std::uint64_t gas_total() const { return gas_total_; }

  std::uint64_t gas_of(const Address& actor) const {
    const auto it = gas_by_actor_.find(actor);
    return it == gas_by_actor_.end() ? 0 : it->second;
  }

  // --- export ----------------------------------------------------------

  std::string dump_events() const {
    std::ostringstream out;
    for (const auto& ev : events_)
      out << ev.line() << "\n";
    return out.str();
  }

  std::string dump_receipts() const {
    std::ostringstream out;
    for (const auto& r : receipts_)
      out << r.line() << "\n";
    return out.str();
  }

  /// Full serialized state, used by determinism checks.
  std::string dump_state() const {
    std::ostringstream out;
    out << "height=" << height_ << " minted=" << minted_
        << " gas_total=" << gas_total_ << "\n";
    for (const auto& [addr, bal] : balances_)
      out << "balance " << addr.hex() << " " << bal << "\n";
    out << dump_events() << dump_receipts();
    return out.str();
  }

 private:
  GasTable gas_;
  std::map<Address, std::uint64_t> balances_;
  std::uint64_t minted_ = 0;
  std::uint64_t height_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<LedgerEvent> events_;
  std::vector<GasReceipt> receipts_;
  std::map<Address, std::uint64_t> gas_by_actor_;
  std::uint64_t gas_total_ = 0;
};

}  // namespace rsiot
