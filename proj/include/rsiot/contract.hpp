// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "rsiot/ledger.hpp"
#include "rsiot/proof.hpp"

namespace rsiot {

enum class ContractErrorCode {
  SelfPair,
  AlreadyRegistered,
  PairNotConfirmed,
  DuplicateServer,
  UnknownServer,
  DepositTooSmall,
  UnknownTxn,
  WrongCaller,
  AlreadyConfirmed,
  NotConfirmed,
  LengthMismatch,
  MalformedProof,
  BadSignatureBinding,
  StaleSerial,
  VerificationFailed,
  BalanceExhausted,
  AlreadyDecommissioning,
  SignatureMismatch,
  DuplicateReport,
  NoPendingReport,
  GraceNotElapsed,
};

class ContractError : public std::runtime_error {
 public:
  ContractError(ContractErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ContractErrorCode code() const { return code_; }

 private:
  ContractErrorCode code_;
};

inline const char* to_string(ContractErrorCode c) {
  switch (c) {
    case ContractErrorCode::SelfPair: return "self_pair";
    case ContractErrorCode::AlreadyRegistered: return "already_registered";
    case ContractErrorCode::PairNotConfirmed: return "pair_not_confirmed";
    case ContractErrorCode::DuplicateServer: return "duplicate_server";
    case ContractErrorCode::UnknownServer: return "unknown_server";
    case ContractErrorCode::DepositTooSmall: return "deposit_too_small";
    case ContractErrorCode::UnknownTxn: return "unknown_txn";
    case ContractErrorCode::WrongCaller: return "wrong_caller";
    case ContractErrorCode::AlreadyConfirmed: return "already_confirmed";
    case ContractErrorCode::NotConfirmed: return "not_confirmed";
    case ContractErrorCode::LengthMismatch: return "length_mismatch";
    case ContractErrorCode::MalformedProof: return "malformed_proof";
    case ContractErrorCode::BadSignatureBinding: return "bad_signature_binding";
    case ContractErrorCode::StaleSerial: return "stale_serial";
    case ContractErrorCode::VerificationFailed: return "verification_failed";
    case ContractErrorCode::BalanceExhausted: return "balance_exhausted";
    case ContractErrorCode::AlreadyDecommissioning:
      return "already_decommissioning";
    case ContractErrorCode::SignatureMismatch: return "signature_mismatch";
    case ContractErrorCode::DuplicateReport: return "duplicate_report";
    case ContractErrorCode::NoPendingReport: return "no_pending_report";
    case ContractErrorCode::GraceNotElapsed: return "grace_not_elapsed";
  }
  return "unknown";
}

enum class ServiceStatus { Pending, Confirmed };

/// One commissioned relay relationship, keyed by txn.
struct ServiceRecord {
  std::uint64_t txn = 0;
  std::uint64_t serial = 0;  // highest settled packet counter; 0 = none
  Address device;
  Address controller;
  Address server;
  std::uint64_t price = 0;    // per packet
  std::uint64_t balance = 0;  // remaining pre-paid fee held in escrow
  ServiceStatus status = ServiceStatus::Pending;
  std::optional<std::uint64_t> delete_at_height;  // set by decommission
};

/// An accusation awaiting rebuttal. The packet is stored exactly as the
/// reporter received it — covered — since that is the only form the accused
/// relay's signature covers.
struct PendingReport {
  std::uint64_t txn = 0;
  std::uint64_t serial = 0;
  Bytes packet;
  std::uint64_t report_height = 0;
};

enum class RebutOutcome { Rebutted, ReportStands };

struct ContractConfig {
  std::uint64_t min_deposit = 1'000'000;
  std::uint64_t grace_blocks = 10;
  std::uint64_t billing_window_blocks = 10;
};

/// The relay-sharing trading contract as a deterministic state machine over
/// the ledger: registration tables, service lifecycle, delivery settlement,
/// and the report / rebut / execute arbitration pipeline.
///
/// verify_delivery is a pure function; the gas-metered entry points run the
/// same code, so a proof accepted locally is accepted on-ledger and vice
/// versa.
class RelayContract {
 public:
  explicit RelayContract(Ledger& ledger, ContractConfig cfg = {})
      : ledger_(ledger), cfg_(cfg) {
    // the contract's own escrow account
    const Digest d = keccak256(std::string_view("rsiot.contract.escrow"));
    std::copy(d.bytes.begin() + 12, d.bytes.end(), address_.bytes.begin());
    ledger_.create_account(address_);
  }

  RelayContract(const RelayContract&) = delete;
  RelayContract& operator=(const RelayContract&) = delete;

  const Address& address() const { return address_; }
  const ContractConfig& config() const { return cfg_; }

  // --- registration ------------------------------------------------------

  /// First call by either end creates the pair unconfirmed; the matching
  /// call by the opposite end flips the confirmation flag.
  void reg_user(const Address& caller, const Address& oppo_end) {
    if (caller == oppo_end)
      throw ContractError(ContractErrorCode::SelfPair,
                          "cannot pair an address with itself");
    require_account(caller);
    const PairKey key = pair_key(caller, oppo_end);
    auto it = user_info_.find(key);
    if (it == user_info_.end()) {
      ledger_.charge_gas(caller, "reg_user.create");
      UserPair pair;
      pair.lo = key.first;
      pair.hi = key.second;
      (caller == key.first ? pair.lo_registered : pair.hi_registered) = true;
      user_info_[key] = pair;
      ledger_.emit_event("user_registered", {{"caller", caller.hex()},
                                             {"oppo_end", oppo_end.hex()},
                                             {"confirmed", "false"}});
      return;
    }
    UserPair& pair = it->second;
    if (pair.confirmed())
      throw ContractError(ContractErrorCode::AlreadyRegistered,
                          "pair already confirmed");
    bool& side = caller == key.first ? pair.lo_registered : pair.hi_registered;
    if (side)
      throw ContractError(ContractErrorCode::AlreadyRegistered,
                          "this end already registered the pair");
    ledger_.charge_gas(caller, "reg_user.confirm");
    side = true;
    ledger_.emit_event("user_registered", {{"caller", caller.hex()},
                                           {"oppo_end", oppo_end.hex()},
                                           {"confirmed", "true"}});
  }

  /// Relay-server registration. The deposit moves into contract escrow and
  /// is only ever paid out as an arbitration penalty.
  void reg_server(const Address& caller, std::uint64_t deposit) {
    require_account(caller);
    if (server_info_.contains(caller))
      throw ContractError(ContractErrorCode::DuplicateServer,
                          "server already registered: " + caller.hex());
    if (deposit == 0 || deposit < cfg_.min_deposit)
      throw ContractError(ContractErrorCode::DepositTooSmall,
                          "deposit below minimum");
    ledger_.charge_gas(caller, "reg_server");
    ledger_.transfer(caller, address_, deposit);
    server_info_[caller] = deposit;
    ledger_.emit_event("server_registered", {{"server", caller.hex()},
                                             {"deposit", std::to_string(deposit)}});
  }

  bool user_confirmed(const Address& a, const Address& b) const {
    const auto it = user_info_.find(pair_key(a, b));
    return it != user_info_.end() && it->second.confirmed();
  }

  bool server_registered(const Address& server) const {
    return server_info_.contains(server);
  }

  std::uint64_t server_deposit(const Address& server) const {
    const auto it = server_info_.find(server);
    return it == server_info_.end() ? 0 : it->second;
  }

  // --- commission ----------------------------------------------------------

  void service_request(const Address& device, const Address& controller) {
    require_confirmed_pair(device, controller);
    ledger_.charge_gas(device, "service_request");
    ledger_.emit_event("service_requested", {{"device", device.hex()},
                                             {"controller", controller.hex()}});
  }

  std::uint64_t service_select(const Address& device, const Address& controller,
                               const Address& server, std::uint64_t price,
                               std::uint64_t prepaid) {
    require_confirmed_pair(device, controller);
    if (!server_info_.contains(server))
      throw ContractError(ContractErrorCode::UnknownServer,
                          "server not registered: " + server.hex());
    ledger_.charge_gas(device, "service_select");
    ledger_.transfer(device, address_, prepaid);
    ServiceRecord rec;
    rec.txn = next_txn_++;
    rec.device = device;
    rec.controller = controller;
    rec.server = server;
    rec.price = price;
    rec.balance = prepaid;
    service_list_[rec.txn] = rec;
    ledger_.emit_event("service_selected",
                       {{"txn", std::to_string(rec.txn)},
                        {"device", device.hex()},
                        {"controller", controller.hex()},
                        {"server", server.hex()},
                        {"price", std::to_string(price)},
                        {"prepaid", std::to_string(prepaid)}});
    return rec.txn;
  }

  void service_confirm(const Address& caller, std::uint64_t txn) {
    ServiceRecord& rec = require_record(txn);
    if (caller != rec.server)
      throw ContractError(ContractErrorCode::WrongCaller,
                          "only the selected server may confirm");
    if (rec.status == ServiceStatus::Confirmed)
      throw ContractError(ContractErrorCode::AlreadyConfirmed,
                          "service already confirmed");
    ledger_.charge_gas(caller, "service_confirm");
    rec.status = ServiceStatus::Confirmed;
    ledger_.emit_event("service_confirmed", {{"txn", std::to_string(txn)},
                                             {"server", caller.hex()}});
  }

  // --- delivery verification and billing -----------------------------------

  /// The verification equation: every committed byte pair must differ by
  /// exactly the cover-stream byte at its selected position. Pure; callable
  /// by anyone without touching the ledger.
  static bool verify_delivery(ByteView b, ByteView b_prime,
                              const IndexList& indices, const CoverKey& pn) {
    if (b.size() != b_prime.size() || b.size() != indices.size())
      throw ContractError(ContractErrorCode::LengthMismatch,
                          "commitment length mismatch");
    for (std::size_t i = 0; i < b.size(); ++i) {
      if ((b[i] ^ b_prime[i]) != cover_byte_at(pn, indices[i]))
        return false;
    }
    return true;
  }

  /// The same check as a posted, gas-metered call.
  bool commitment_verify(const Address& caller, ByteView b, ByteView b_prime,
                         const IndexList& indices, const CoverKey& pn) {
    ledger_.charge_gas(caller, "commitment.verify");
    const bool ok = verify_delivery(b, b_prime, indices, pn);
    ledger_.emit_event("commitment_verified",
                       {{"caller", caller.hex()}, {"ok", ok ? "true" : "false"}});
    return ok;
  }

  /// Post a proof triple and collect payment for every packet between the
  /// recorded serial and the proof's serial. Only the newest proof is
  /// needed; the receiver's signed serial acknowledges everything before it.
  std::uint64_t settle(const Address& caller, const ProofTriple& triple,
                       std::uint64_t txn) {
    ServiceRecord& rec = require_record(txn);
    if (rec.status != ServiceStatus::Confirmed)
      throw ContractError(ContractErrorCode::NotConfirmed,
                          "service not confirmed");
    if (caller != rec.server)
      throw ContractError(ContractErrorCode::WrongCaller,
                          "only the serving relay may settle");
    if (triple.txn != txn)
      throw ContractError(ContractErrorCode::MalformedProof,
                          "proof names a different txn");

    const auto sc = decode_sender_commitment(triple.sender_commit.payload);
    const auto rc = decode_receiver_commitment(triple.receiver_commit.payload);
    const auto kr = decode_cover_key_reveal(triple.cover_reveal.payload);
    if (!sc || !rc || !kr)
      throw ContractError(ContractErrorCode::MalformedProof,
                          "undecodable commitment payload");
    if (sc->txn != txn || rc->txn != txn || kr->txn != txn ||
        sc->serial != triple.serial || rc->serial != triple.serial ||
        kr->serial != triple.serial)
      throw ContractError(ContractErrorCode::MalformedProof,
                          "txn/serial disagreement across the triple");

    // the three transactions of the proof, paid by their original signers
    ledger_.charge_gas(rec.controller, "commitment.sender");
    ledger_.charge_gas(rec.device, "commitment.receiver",
                       rc->commit.size() + rc->indices.size() * 4);
    ledger_.charge_gas(caller, "commitment.verify");

    // signatures must recover to the record's three distinct parties, with
    // the sender and receiver commitments from opposite user ends
    const Address sender = triple.sender_commit.signer();
    const Address receiver = triple.receiver_commit.signer();
    const Address revealer = triple.cover_reveal.signer();
    const bool user_ends_ok =
        (sender == rec.controller && receiver == rec.device) ||
        (sender == rec.device && receiver == rec.controller);
    if (!user_ends_ok || revealer != rec.server)
      throw ContractError(ContractErrorCode::BadSignatureBinding,
                          "proof signatures do not bind to the record");

    if (triple.serial <= rec.serial)
      throw ContractError(ContractErrorCode::StaleSerial,
                          "proof serial not beyond the recorded serial");

    if (!verify_delivery(sc->commit, rc->commit, rc->indices, kr->key))
      throw ContractError(ContractErrorCode::VerificationFailed,
                          "commitments do not match the cover key");

    const std::uint64_t packets = triple.serial - rec.serial;
    const std::uint64_t payment = packets * rec.price;
    if (payment > rec.balance)
      throw ContractError(ContractErrorCode::BalanceExhausted,
                          "pre-paid balance cannot cover the settlement");

    ledger_.transfer(address_, rec.server, payment);
    rec.balance -= payment;
    rec.serial = triple.serial;
    ledger_.emit_event("settled", {{"txn", std::to_string(txn)},
                                   {"serial", std::to_string(triple.serial)},
                                   {"packets", std::to_string(packets)},
                                   {"payment", std::to_string(payment)},
                                   {"pn", kr->key.hex()}});
    return payment;
  }

  // --- decommission ---------------------------------------------------------

  /// Any of the three parties may end the relationship. The record lingers
  /// for the billing window so the relay can post a final settlement, then
  /// sweep_expired deletes it and refunds the residue to the device.
  void decommission(const Address& caller, std::uint64_t txn) {
    ServiceRecord& rec = require_record(txn);
    if (caller != rec.device && caller != rec.controller &&
        caller != rec.server)
      throw ContractError(ContractErrorCode::WrongCaller,
                          "caller is not a party to this service");
    if (rec.delete_at_height)
      throw ContractError(ContractErrorCode::AlreadyDecommissioning,
                          "decommission already in progress");
    ledger_.charge_gas(caller, "decommission");
    rec.delete_at_height = ledger_.height() + cfg_.billing_window_blocks;
    ledger_.emit_event("decommission_started",
                       {{"txn", std::to_string(txn)},
                        {"caller", caller.hex()},
                        {"delete_at", std::to_string(*rec.delete_at_height)}});
  }

  /// Delete every service record whose billing window has elapsed,
  /// refunding the unspent pre-paid balance. The harness calls this after
  /// advancing the block clock.
  void sweep_expired() {
    for (auto it = service_list_.begin(); it != service_list_.end();) {
      const ServiceRecord& rec = it->second;
      if (rec.delete_at_height && ledger_.height() >= *rec.delete_at_height) {
        const std::uint64_t refund = rec.balance;
        ledger_.transfer(address_, rec.device, refund);
        ledger_.emit_event("service_deleted",
                           {{"txn", std::to_string(rec.txn)},
                            {"refund", std::to_string(refund)}});
        it = service_list_.erase(it);
      } else {
        ++it;
      }
    }
  }

  // --- arbitration -----------------------------------------------------------

  /// File an accusation: the reported packet must carry the accused relay's
  /// own signature, otherwise the report is refused outright — nobody can
  /// be framed with fabricated bytes. Payload gas makes this call scale
  /// with packet size.
  const PendingReport& reporting(const Address& caller, std::uint64_t txn,
                                 std::uint64_t serial, ByteView packet,
                                 const Signature& relay_sig) {
    ServiceRecord& rec = require_record(txn);
    if (rec.status != ServiceStatus::Confirmed)
      throw ContractError(ContractErrorCode::NotConfirmed,
                          "service not confirmed");
    if (caller != rec.device)
      throw ContractError(ContractErrorCode::WrongCaller,
                          "only the device may report");
    ledger_.charge_gas(caller, "reporting", packet.size());
    if (recover(packet, relay_sig) != rec.server)
      throw ContractError(ContractErrorCode::SignatureMismatch,
                          "signature does not recover to the accused server");
    const auto key = std::make_pair(txn, serial);
    if (pending_reports_.contains(key))
      throw ContractError(ContractErrorCode::DuplicateReport,
                          "a report for this packet is already pending");
    PendingReport rep;
    rep.txn = txn;
    rep.serial = serial;
    rep.packet.assign(packet.begin(), packet.end());
    rep.report_height = ledger_.height();
    auto [it, _] = pending_reports_.emplace(key, std::move(rep));
    ledger_.emit_event("report_filed",
                       {{"txn", std::to_string(txn)},
                        {"serial", std::to_string(serial)},
                        {"packet_len", std::to_string(packet.size())},
                        {"height", std::to_string(ledger_.height())}});
    return it->second;
  }

  /// The accused relay's defense: reveal the cover key and the sender's
  /// signature. The contract uncovers the stored packet and checks the
  /// signature attributes it to the controller; if so the accusation is
  /// groundless and the record is deleted. A failed rebut changes nothing
  /// and may be retried within the grace period.
  RebutOutcome rebutting(const Address& caller, std::uint64_t txn,
                         std::uint64_t serial, const Signature& controller_sig,
                         const CoverKey& pn) {
    ServiceRecord& rec = require_record(txn);
    if (caller != rec.server)
      throw ContractError(ContractErrorCode::WrongCaller,
                          "only the accused relay may rebut");
    const auto key = std::make_pair(txn, serial);
    const auto it = pending_reports_.find(key);
    if (it == pending_reports_.end())
      throw ContractError(ContractErrorCode::NoPendingReport,
                          "no pending report for this packet");
    ledger_.charge_gas(caller, "rebutting", it->second.packet.size());
    const Bytes uncovered = apply_cover(it->second.packet, pn);
    if (recover(uncovered, controller_sig) == rec.controller) {
      pending_reports_.erase(it);
      ledger_.emit_event("report_rebutted", {{"txn", std::to_string(txn)},
                                             {"serial", std::to_string(serial)}});
      return RebutOutcome::Rebutted;
    }
    ledger_.emit_event("rebut_failed", {{"txn", std::to_string(txn)},
                                        {"serial", std::to_string(serial)}});
    return RebutOutcome::ReportStands;
  }

  /// After the grace period the reporter may execute the penalty: the whole
  /// deposit moves to the reporting device and the relay's registration is
  /// revoked, so it can never be selected again.
  std::uint64_t execute(const Address& caller, std::uint64_t txn,
                        std::uint64_t serial) {
    ServiceRecord& rec = require_record(txn);
    if (caller != rec.device)
      throw ContractError(ContractErrorCode::WrongCaller,
                          "only the reporting device may execute");
    const auto key = std::make_pair(txn, serial);
    const auto it = pending_reports_.find(key);
    if (it == pending_reports_.end())
      throw ContractError(ContractErrorCode::NoPendingReport,
                          "no pending report for this packet");
    ledger_.charge_gas(caller, "execute");
    if (ledger_.height() - it->second.report_height <= cfg_.grace_blocks)
      throw ContractError(ContractErrorCode::GraceNotElapsed,
                          "grace period still running");
    std::uint64_t penalty = 0;
    const auto sit = server_info_.find(rec.server);
    if (sit != server_info_.end()) {
      penalty = sit->second;
      ledger_.transfer(address_, rec.device, penalty);
      server_info_.erase(sit);
    }
    pending_reports_.erase(it);
    ledger_.emit_event("penalty_executed",
                       {{"txn", std::to_string(txn)},
                        {"serial", std::to_string(serial)},
                        {"server", rec.server.hex()},
                        {"penalty", std::to_string(penalty)}});
    return penalty;
  }

  // --- introspection -----------------------------------------------------------

  const ServiceRecord* find_service(std::uint64_t txn) const {
    const auto it = service_list_.find(txn);
    return it == service_list_.end() ? nullptr : &it->second;
  }

  bool has_pending_report(std::uint64_t txn, std::uint64_t serial) const {
    return pending_reports_.contains({txn, serial});
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> pending_report_keys()
      const {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;
    keys.reserve(pending_reports_.size());
    for (const auto& [key, rep] : pending_reports_)
      keys.push_back(key);
    return keys;
  }

  const PendingReport* find_report(std::uint64_t txn,
                                   std::uint64_t serial) const {
    const auto it = pending_reports_.find({txn, serial});
    return it == pending_reports_.end() ? nullptr : &it->second;
  }

  /// Escrow must always equal the funds the tables account for.
  std::uint64_t expected_escrow() const {
    std::uint64_t sum = 0;
    for (const auto& [txn, rec] : service_list_)
      sum += rec.balance;
    for (const auto& [server, deposit] : server_info_)
      sum += deposit;
    return sum;
  }

  bool escrow_consistent() const {
    return ledger_.balance(address_) == expected_escrow();
  }

  /// All four tables as structured text, one record per line.
  std::string dump_state() const {
    std::ostringstream out;
    for (const auto& [key, pair] : user_info_)
      out << "user_info lo=" << pair.lo.hex() << " hi=" << pair.hi.hex()
          << " confirmed=" << (pair.confirmed() ? "true" : "false") << "\n";
    for (const auto& [server, deposit] : server_info_)
      out << "server_info server=" << server.hex() << " deposit=" << deposit
          << "\n";
    for (const auto& [txn, rec] : service_list_) {
      out << "service txn=" << rec.txn << " serial=" << rec.serial
          << " device=" << rec.device.hex()
          << " controller=" << rec.controller.hex()
          << " server=" << rec.server.hex() << " price=" << rec.price
          << " balance=" << rec.balance << " status="
          << (rec.status == ServiceStatus::Confirmed ? "confirmed" : "pending");
      if (rec.delete_at_height)
        out << " delete_at=" << *rec.delete_at_height;
      out << "\n";
    }
    for (const auto& [key, rep] : pending_reports_)
      out << "pending_report txn=" << rep.txn << " serial=" << rep.serial
          << " packet_len=" << rep.packet.size()
          << " report_height=" << rep.report_height << "\n";
    return out.str();
  }

 private:
  using PairKey = std::pair<Address, Address>;

  struct UserPair {
    Address lo, hi;
    bool lo_registered = false;
    bool hi_registered = false;
    bool confirmed() const { return lo_registered && hi_registered; }
  };

  static PairKey pair_key(const Address& a, const Address& b) {
    return a < b ? PairKey{a, b} : PairKey{b, a};
  }

  void require_account(const Address& addr) const {
    ledger_.balance(addr);  // throws UnknownAccount
  }

  void require_confirmed_pair(const Address& a, const Address& b) const {
    if (!user_confirmed(a, b))
      throw ContractError(ContractErrorCode::PairNotConfirmed,
                          "user pair not confirmed");
  }

  ServiceRecord& require_record(std::uint64_t txn) {
    const auto it = service_list_.find(txn);
    if (it == service_list_.end())
      throw ContractError(ContractErrorCode::UnknownTxn,
                          "unknown service txn " + std::to_string(txn));
    return it->second;
  }

  Ledger& ledger_;
  Address address_;
  ContractConfig cfg_;
  std::map<PairKey, UserPair> user_info_;
  std::map<Address, std::uint64_t> server_info_;
  std::map<std::uint64_t, ServiceRecord> service_list_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, PendingReport>
      pending_reports_;
  std::uint64_t next_txn_ = 1;
};

}  // namespace rsiot
