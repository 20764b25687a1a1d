// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <deque>
#include <map>
#include <optional>

#include "rsiot/scenario.hpp"

namespace rsiot {

struct RunResult {
  Scenario scenario;
  bool pass = false;
  std::string expected;
  std::string actual;

  std::uint64_t relay_revenue = 0;
  std::uint64_t device_refund = 0;
  std::uint64_t penalty_paid = 0;
  std::uint64_t delivered = 0;
  std::uint64_t reports_filed = 0;
  std::uint64_t rebuts_succeeded = 0;
  std::uint64_t invariant_violations = 0;
  std::uint64_t gas_total = 0;

  std::string transcript;
  std::string contract_state;
  std::string events;
  std::string receipts;
  std::vector<GasReceipt> receipt_records;
  std::map<std::string, std::uint64_t> balances;  // by role
};

namespace detail {

/// Single FIFO message queue: enqueue order is delivery order, so runs are
/// schedule-deterministic by construction.
class MessagePump {
 public:
  MessagePump(Controller& controller, Device& device, Relay& relay,
              Chain& chain, Transcript& transcript)
      : controller_(controller),
        device_(device),
        relay_(relay),
        chain_(chain),
        transcript_(transcript) {}

  void post(ChannelMessage msg) {
    const std::uint64_t seq = chain_.next_seq();
    transcript_.add(seq, "msg seq=" + std::to_string(seq) +
                             " from=" + to_string(msg.from) +
                             " to=" + to_string(msg.to) +
                             " kind=" + to_string(msg.kind) +
                             " serial=" + std::to_string(msg.serial) +
                             " len=" + std::to_string(msg.record.payload.size()));
    queue_.push_back(std::move(msg));
  }

  void pump() {
    while (!queue_.empty()) {
      const ChannelMessage msg = std::move(queue_.front());
      queue_.pop_front();
      dispatch(msg);
    }
  }

 private:
  void dispatch(const ChannelMessage& msg) {
    switch (msg.to) {
      case ActorId::Relay: {
        std::optional<ChannelMessage> out;
        if (msg.kind == MsgKind::ReceiverCommit)
          out = relay_.on_receiver_commit(msg);
        else
          out = relay_.on_controller_record(msg);
        if (out)
          post(std::move(*out));
        break;
      }
      case ActorId::Device: {
        if (msg.kind == MsgKind::CoveredPacket) {
          if (auto out = device_.receive(msg))
            post(std::move(*out));
        } else if (msg.kind == MsgKind::CoverKeyRelease) {
          const auto res = device_.finalize(msg, chain_);
          if (res.status == Device::FinalizeResult::Status::Discarded)
            chain_.note("device discarded serial=" +
                        std::to_string(res.serial) +
                        " reason=cover_key_mismatch");
        }
        break;
      }
      case ActorId::Controller:
        break;  // nothing flows back to the controller in this model
    }
  }

  Controller& controller_;
  Device& device_;
  Relay& relay_;
  Chain& chain_;
  Transcript& transcript_;
  std::deque<ChannelMessage> queue_;
};

inline Bytes make_payload(const Scenario& s, std::uint64_t serial,
                          SplitMix64& rng) {
  if (s.payload_class == "random")
    return rng.bytes(s.packet_size);
  std::string text = "CMD " + std::to_string(serial) + " ";
  static constexpr char kAlphabet[] =
      "abcdefghijklmnopqrstuvwxyz0123456789";
  while (text.size() < s.packet_size)
    text.push_back(kAlphabet[rng.below(sizeof(kAlphabet) - 1)]);
  text.resize(s.packet_size);
  return to_bytes(text);
}

inline SecretKey actor_key(std::uint64_t master, std::string_view label) {
  std::uint64_t v = derive_seed(master, label);
  if (v == 0)
    v = 1;
  return SecretKey::from_u64(v);
}

inline std::string verdict_kind(const Scenario& s) {
  const RelayBehavior rb = s.parse_relay_behavior();
  const DeviceBehavior db = s.parse_device_behavior();
  if (rb.kind == RelayBehavior::Kind::Inject) return "inject";
  if (rb.kind == RelayBehavior::Kind::Tamper) return "tamper";
  if (rb.kind == RelayBehavior::Kind::WithholdKey) return "withhold";
  if (db.kind == DeviceBehavior::Kind::CheatRandomCommit) return "cheat";
  if (db.kind == DeviceBehavior::Kind::ReportBenign) return "reporting";
  return "honest";
}

}  // namespace detail

/// Execute one scenario end to end and judge the outcome against what the
/// configured behaviors are supposed to produce.
inline RunResult run_scenario(const Scenario& scenario) {
  scenario.validate();
  RunResult res;
  res.scenario = scenario;

  GasTable gas = scenario.gas_table_path.empty()
                     ? GasTable::defaults()
                     : GasTable::load_file(scenario.gas_table_path);
  Ledger ledger(gas);
  Transcript transcript;
  {
    std::istringstream cfg(scenario.config_lines());
    std::string line;
    while (std::getline(cfg, line))
      transcript.add(ledger.next_seq(), line);
  }

  RelayContract contract(ledger, {scenario.min_deposit, scenario.grace_blocks,
                                  scenario.billing_window_blocks});
  Chain chain(ledger, contract, transcript);

  const SecretKey sk_device = detail::actor_key(scenario.seed, "key.device");
  const SecretKey sk_controller =
      detail::actor_key(scenario.seed, "key.controller");
  const SecretKey sk_relay = detail::actor_key(scenario.seed, "key.relay");
  const Address addr_device = derive_address(sk_device);
  const Address addr_controller = derive_address(sk_controller);
  const Address addr_relay = derive_address(sk_relay);

  ledger.create_account(addr_device);
  ledger.create_account(addr_controller);
  ledger.create_account(addr_relay);
  chain.faucet(addr_device, scenario.initial_funds);
  chain.faucet(addr_controller, scenario.initial_funds);
  chain.faucet(addr_relay, scenario.initial_funds);

  // registration and commission
  chain.reg_user(addr_device, addr_controller);
  chain.reg_user(addr_controller, addr_device);
  chain.reg_server(addr_relay, scenario.deposit);
  chain.service_request(addr_device, addr_controller);
  ledger.emit_event("quote", {{"server", addr_relay.hex()},
                              {"price", std::to_string(scenario.price)},
                              {"endpoint", "relay.sim:4460"}});
  const std::uint64_t txn =
      chain.service_select(addr_device, addr_controller, addr_relay,
                           scenario.price, scenario.prepaid);
  chain.service_confirm(addr_relay, txn);

  // session keys shared by the user-side pair
  const EncryptionKey enc_key =
      EncryptionKey::from_seed(derive_seed(scenario.seed, "session.enc"));
  const SelectorSeed sel_seed =
      SelectorSeed::from_seed(derive_seed(scenario.seed, "session.sel"));

  const DeviceBehavior device_behavior = scenario.parse_device_behavior();
  const RelayBehavior relay_behavior = scenario.parse_relay_behavior();
  const InspectionPredicate inspector =
      scenario.payload_class == "command"
          ? command_frame_inspector()
          : InspectionPredicate([](ByteView) { return false; });

  Controller controller(sk_controller, enc_key, sel_seed, txn,
                        scenario.commitment_length);
  Device device(sk_device, enc_key, sel_seed, txn, scenario.commitment_length,
                addr_controller, addr_relay, device_behavior, inspector,
                SplitMix64(derive_seed(scenario.seed, "rng.device")));
  Relay relay(sk_relay, txn, addr_controller, addr_device, relay_behavior,
              SplitMix64(derive_seed(scenario.seed, "rng.relay")));

  detail::MessagePump pump(controller, device, relay, chain, transcript);
  SplitMix64 payload_rng(derive_seed(scenario.seed, "rng.payload"));

  // traffic
  std::map<std::uint64_t, Bytes> sent;
  for (std::uint64_t serial = 1; serial <= scenario.packets; ++serial) {
    const Bytes msg = detail::make_payload(scenario, serial, payload_rng);
    sent[serial] = msg;
    auto [pkt, cmt] = controller.send(msg);
    pump.post(std::move(pkt));
    pump.post(std::move(cmt));
    pump.pump();
    if (scenario.blocks_per_packet)
      chain.advance_blocks(scenario.blocks_per_packet);
  }

  if (relay_behavior.kind == RelayBehavior::Kind::Inject) {
    SplitMix64 attack_rng(derive_seed(scenario.seed, "rng.attack"));
    pump.post(relay.inject(attack_rng.bytes(scenario.packet_size)));
    pump.pump();
  }

  // billing
  try {
    if (auto payment = relay.cash_out(chain))
      res.relay_revenue += *payment;
  } catch (const ContractError&) {
    // settlement refused; the transcript has the reason
  }

  // arbitration
  res.reports_filed = device.filed_reports().size();
  const std::uint64_t relay_balance_before_arbitration =
      ledger.balance(addr_relay);
  for (const auto& key : contract.pending_report_keys()) {
    try {
      if (relay.rebut(key.second, chain) == RebutOutcome::Rebutted)
        ++res.rebuts_succeeded;
    } catch (const std::exception&) {
      // rebut attempt impossible or refused; the report stands
    }
  }
  bool reselect_refused = false;
  if (!contract.pending_report_keys().empty()) {
    chain.advance_blocks(scenario.grace_blocks + 1);
    res.penalty_paid = device.execute_reports(chain);
    // a deregistered server must never be selectable again
    try {
      chain.service_select(addr_device, addr_controller, addr_relay,
                           scenario.price, scenario.prepaid);
    } catch (const ContractError& e) {
      reselect_refused = e.code() == ContractErrorCode::UnknownServer;
    }
  }
  const std::uint64_t relay_balance_after_arbitration =
      ledger.balance(addr_relay);

  // decommission and refund
  const std::uint64_t device_balance_before = ledger.balance(addr_device);
  chain.decommission(addr_device, txn);
  chain.advance_blocks(scenario.billing_window_blocks);
  res.device_refund = ledger.balance(addr_device) - device_balance_before;

  // verdict
  res.delivered = device.delivered().size();
  res.invariant_violations = chain.invariant_violations();
  bool plaintext_match = true;
  for (const auto& [serial, plaintext] : device.delivered()) {
    const auto it = sent.find(serial);
    if (it == sent.end() || it->second != plaintext)
      plaintext_match = false;
  }
  bool settle_reveals_key = false;
  for (const auto& ev : ledger.events()) {
    if (ev.kind == "settled")
      for (const auto& [k, v] : ev.payload)
        if (k == "pn" && !v.empty())
          settle_reveals_key = true;
  }
  bool report_gas_charged = false;
  for (const auto& r : ledger.receipts())
    if (r.op == "reporting" && r.actor == addr_device)
      report_gas_charged = true;

  const std::string kind = detail::verdict_kind(scenario);
  std::ostringstream expected, actual;
  if (kind == "honest") {
    const std::uint64_t pay = scenario.packets * scenario.price;
    expected << "revenue=" << pay << " refund=" << scenario.prepaid - pay
             << " delivered=" << scenario.packets
             << " reports=0 plaintext_match=true invariants=0";
    actual << "revenue=" << res.relay_revenue << " refund=" << res.device_refund
           << " delivered=" << res.delivered << " reports=" << res.reports_filed
           << " plaintext_match=" << (plaintext_match ? "true" : "false")
           << " invariants=" << res.invariant_violations;
  } else if (kind == "inject") {
    expected << "penalty=" << scenario.deposit
             << " server_registered=false reselect=refused pending=0"
             << " invariants=0";
    actual << "penalty=" << res.penalty_paid << " server_registered="
           << (contract.server_registered(addr_relay) ? "true" : "false")
           << " reselect=" << (reselect_refused ? "refused" : "allowed")
           << " pending=" << contract.pending_report_keys().size()
           << " invariants=" << res.invariant_violations;
  } else if (kind == "reporting") {
    expected << "rebutted=1 pending=0 relay_balance_delta=0"
             << " deposit=" << scenario.deposit
             << " report_gas_charged=true invariants=0";
    actual << "rebutted=" << res.rebuts_succeeded
           << " pending=" << contract.pending_report_keys().size()
           << " relay_balance_delta="
           << relay_balance_after_arbitration - relay_balance_before_arbitration
           << " deposit=" << contract.server_deposit(addr_relay)
           << " report_gas_charged=" << (report_gas_charged ? "true" : "false")
           << " invariants=" << res.invariant_violations;
  } else if (kind == "cheat") {
    expected << "delivered=0 released=0 revenue=0 refund=" << scenario.prepaid
             << " invariants=0";
    actual << "delivered=" << res.delivered << " released=" << relay.released()
           << " revenue=" << res.relay_revenue
           << " refund=" << res.device_refund
           << " invariants=" << res.invariant_violations;
  } else if (kind == "tamper") {
    expected << "delivered=0 withheld=" << scenario.packets
             << " revenue=0 refund=" << scenario.prepaid << " invariants=0";
    actual << "delivered=" << res.delivered << " withheld=" << relay.withheld()
           << " revenue=" << res.relay_revenue
           << " refund=" << res.device_refund
           << " invariants=" << res.invariant_violations;
  } else {  // withhold
    const std::uint64_t pay = scenario.packets * scenario.price;
    expected << "delivered=0 revenue=" << pay << " key_on_chain=true refund="
             << scenario.prepaid - pay << " invariants=0";
    actual << "delivered=" << res.delivered << " revenue=" << res.relay_revenue
           << " key_on_chain=" << (settle_reveals_key ? "true" : "false")
           << " refund=" << res.device_refund
           << " invariants=" << res.invariant_violations;
  }
  res.expected = expected.str();
  res.actual = actual.str();
  res.pass = res.expected == res.actual;

  // final snapshot
  res.balances["device"] = ledger.balance(addr_device);
  res.balances["controller"] = ledger.balance(addr_controller);
  res.balances["relay"] = ledger.balance(addr_relay);
  res.balances["contract"] = ledger.balance(contract.address());
  res.gas_total = ledger.gas_total();
  for (const auto& [role, value] : res.balances)
    transcript.add(ledger.next_seq(), "balance role=" + role +
                                          " value=" + std::to_string(value));
  transcript.add(ledger.next_seq(),
                 "verdict kind=" + kind + " pass=" +
                     (res.pass ? "true" : "false") + " expected=[" +
                     res.expected + "] actual=[" + res.actual + "]");

  transcript.absorb(ledger);
  res.transcript = transcript.serialize();
  res.contract_state = contract.dump_state();
  res.events = ledger.dump_events();
  res.receipts = ledger.dump_receipts();
  res.receipt_records = ledger.receipts();
  return res;
}

}  // namespace rsiot
