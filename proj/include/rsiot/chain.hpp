// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>
#include <string>

#include "rsiot/contract.hpp"
#include "rsiot/transcript.hpp"

namespace rsiot {

/// Logged gateway to the ledger and contract: every call becomes a
/// transcript line with its outcome, and the escrow/conservation invariants
/// are re-checked after each one. Actors and scenario drivers never touch
/// the contract except through this.
class Chain {
 public:
  Chain(Ledger& ledger, RelayContract& contract, Transcript& transcript)
      : ledger_(ledger), contract_(contract), transcript_(transcript) {}

  Ledger& ledger() { return ledger_; }
  RelayContract& contract() { return contract_; }
  std::uint64_t invariant_violations() const { return invariant_violations_; }

  void faucet(const Address& who, std::uint64_t amount) {
    const std::uint64_t seq = ledger_.next_seq();
    ledger_.mint(who, amount);
    log(seq, "fn=faucet actor=" + who.hex() +
                 " amount=" + std::to_string(amount) + " status=ok");
    check_invariants();
  }

  void reg_user(const Address& caller, const Address& oppo) {
    call("reg_user", "caller=" + caller.hex() + " oppo_end=" + oppo.hex(),
         [&] { contract_.reg_user(caller, oppo); });
  }

  void reg_server(const Address& caller, std::uint64_t deposit) {
    call("reg_server",
         "caller=" + caller.hex() + " deposit=" + std::to_string(deposit),
         [&] { contract_.reg_server(caller, deposit); });
  }

  void service_request(const Address& device, const Address& controller) {
    call("service_request",
         "device=" + device.hex() + " controller=" + controller.hex(),
         [&] { contract_.service_request(device, controller); });
  }

  std::uint64_t service_select(const Address& device, const Address& controller,
                               const Address& server, std::uint64_t price,
                               std::uint64_t prepaid) {
    std::uint64_t txn = 0;
    call("service_select",
         "device=" + device.hex() + " server=" + server.hex() +
             " price=" + std::to_string(price) +
             " prepaid=" + std::to_string(prepaid),
         [&] { txn = contract_.service_select(device, controller, server,
                                              price, prepaid); });
    return txn;
  }

  void service_confirm(const Address& caller, std::uint64_t txn) {
    call("service_confirm",
         "caller=" + caller.hex() + " txn=" + std::to_string(txn),
         [&] { contract_.service_confirm(caller, txn); });
  }

  std::uint64_t settle(const Address& caller, const ProofTriple& triple,
                       std::uint64_t txn) {
    std::uint64_t payment = 0;
    call("settle",
         "caller=" + caller.hex() + " txn=" + std::to_string(txn) +
             " serial=" + std::to_string(triple.serial),
         [&] { payment = contract_.settle(caller, triple, txn); });
    return payment;
  }

  bool commitment_verify(const Address& caller, ByteView b, ByteView b_prime,
                         const IndexList& indices, const CoverKey& pn) {
    bool ok = false;
    call("commitment_verify", "caller=" + caller.hex(),
         [&] { ok = contract_.commitment_verify(caller, b, b_prime, indices,
                                                pn); });
    return ok;
  }

  void decommission(const Address& caller, std::uint64_t txn) {
    call("decommission",
         "caller=" + caller.hex() + " txn=" + std::to_string(txn),
         [&] { contract_.decommission(caller, txn); });
  }

  const PendingReport& reporting(const Address& caller, std::uint64_t txn,
                                 std::uint64_t serial, ByteView packet,
                                 const Signature& relay_sig) {
    const PendingReport* rep = nullptr;
    call("reporting",
         "caller=" + caller.hex() + " txn=" + std::to_string(txn) +
             " serial=" + std::to_string(serial) +
             " packet_len=" + std::to_string(packet.size()),
         [&] { rep = &contract_.reporting(caller, txn, serial, packet,
                                          relay_sig); });
    return *rep;
  }

  RebutOutcome rebutting(const Address& caller, std::uint64_t txn,
                         std::uint64_t serial, const Signature& controller_sig,
                         const CoverKey& pn) {
    RebutOutcome outcome = RebutOutcome::ReportStands;
    call("rebutting",
         "caller=" + caller.hex() + " txn=" + std::to_string(txn) +
             " serial=" + std::to_string(serial),
         [&] { outcome = contract_.rebutting(caller, txn, serial,
                                             controller_sig, pn); },
         [&] { return outcome == RebutOutcome::Rebutted ? "ok outcome=rebutted"
                                                        : "ok outcome=stands"; });
    return outcome;
  }

  std::uint64_t execute(const Address& caller, std::uint64_t txn,
                        std::uint64_t serial) {
    std::uint64_t penalty = 0;
    call("execute",
         "caller=" + caller.hex() + " txn=" + std::to_string(txn) +
             " serial=" + std::to_string(serial),
         [&] { penalty = contract_.execute(caller, txn, serial); });
    return penalty;
  }

  /// Advance the block clock and run the contract's expiry sweep, which is
  /// where decommissioned records actually get deleted and refunded.
  std::uint64_t advance_blocks(std::uint64_t n) {
    const std::uint64_t seq = ledger_.next_seq();
    const std::uint64_t h = ledger_.advance_blocks(n);
    transcript_.add(seq, "advance seq=" + std::to_string(seq) +
                             " blocks=" + std::to_string(n) +
                             " height=" + std::to_string(h));
    contract_.sweep_expired();
    check_invariants();
    return h;
  }

  std::uint64_t next_seq() { return ledger_.next_seq(); }

  void note(const std::string& text) {
    const std::uint64_t seq = ledger_.next_seq();
    transcript_.add(seq, "note seq=" + std::to_string(seq) + " " + text);
  }

 private:
  void call(const std::string& fn, const std::string& args,
            const std::function<void()>& body,
            const std::function<std::string()>& ok_status = nullptr) {
    const std::uint64_t seq = ledger_.next_seq();
    const std::string prefix =
        "fn=" + fn + " " + args + " status=";
    try {
      body();
    } catch (const ContractError& e) {
      log(seq, prefix + "err:" + to_string(e.code()));
      check_invariants();
      throw;
    } catch (const LedgerError& e) {
      log(seq, prefix + (e.code() == LedgerErrorCode::GasLimitExceeded
                             ? "err:gas_limit_exceeded"
                             : "err:ledger"));
      check_invariants();
      throw;
    }
    log(seq, prefix + (ok_status ? ok_status() : "ok"));
    check_invariants();
  }

  void log(std::uint64_t seq, std::string text) {
    transcript_.add(seq,
                    "call seq=" + std::to_string(seq) + " " + std::move(text));
  }

  void check_invariants() {
    const bool conserved = ledger_.total_balance() == ledger_.total_minted();
    const bool escrowed = contract_.escrow_consistent();
    if (!conserved || !escrowed) {
      ++invariant_violations_;
      const std::uint64_t seq = ledger_.next_seq();
      transcript_.add(seq, "invariant_violation seq=" + std::to_string(seq) +
                               " conserved=" + (conserved ? "true" : "false") +
                               " escrow=" + (escrowed ? "true" : "false"));
    }
  }

  Ledger& ledger_;
  RelayContract& contract_;
  Transcript& transcript_;
  std::uint64_t invariant_violations_ = 0;
};

}  // namespace rsiot
