// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>

#include "rsiot/chain.hpp"
#include "rsiot/proof.hpp"
#include "rsiot/rng.hpp"

namespace rsiot {

enum class ActorId { Controller, Device, Relay };

inline const char* to_string(ActorId id) {
  switch (id) {
    case ActorId::Controller: return "controller";
    case ActorId::Device: return "device";
    case ActorId::Relay: return "relay";
  }
  return "?";
}

enum class MsgKind {
  Packet,          // controller -> relay: encrypted application packet
  SenderCommit,    // controller -> relay: commitment over that packet
  CoveredPacket,   // relay -> device: the packet, covered
  ReceiverCommit,  // device -> relay: commitment over the covered packet
  CoverKeyRelease  // relay -> device: the cover key (plus the sender commit)
};

inline const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::Packet: return "packet";
    case MsgKind::SenderCommit: return "sender_commit";
    case MsgKind::CoveredPacket: return "covered_packet";
    case MsgKind::ReceiverCommit: return "receiver_commit";
    case MsgKind::CoverKeyRelease: return "cover_key";
  }
  return "?";
}

/// One record on a relay channel. Everything is signed; `attached` rides
/// along on the cover-key release so the receiver can check the key against
/// the sender's commitment before trusting it.
struct ChannelMessage {
  ActorId from;
  ActorId to;
  MsgKind kind;
  std::uint64_t serial = 0;
  SignedRecord record;
  std::optional<SignedRecord> attached;
};

// ---------------------------------------------------------------------------

/// Controller endpoint: encrypts outbound messages, commits to the selected
/// bytes, signs both records. Keeps its recent commitments for diagnostics.
class Controller {
 public:
  struct SentCommit {
    Bytes packet;
    IndexList indices;
    Bytes commit;
  };

  Controller(const SecretKey& sk, EncryptionKey k, SelectorSeed s,
             std::uint64_t txn, std::size_t commit_len)
      : sk_(sk),
        addr_(derive_address(sk)),
        enc_key_(k),
        sel_seed_(s),
        txn_(txn),
        commit_len_(commit_len) {}

  const Address& address() const { return addr_; }
  std::uint64_t next_serial() const { return next_serial_; }

  /// Emit one packet: the signed ciphertext and the signed commitment over
  /// its selected bytes. Empty messages are refused — the selector has no
  /// positions to draw from a zero-length packet.
  std::pair<ChannelMessage, ChannelMessage> send(ByteView msg) {
    if (txn_ == 0)
      throw std::logic_error("controller: no confirmed service relationship");
    if (msg.empty())
      throw std::invalid_argument("controller: cannot send an empty message");
    const std::uint64_t serial = next_serial_++;
    Bytes packet = stream_encrypt(enc_key_, serial, msg);
    IndexList indices =
        select_indices(sel_seed_, serial, commit_len_, packet.size());
    Bytes commit = extract_bytes(packet, indices);

    ChannelMessage pkt{ActorId::Controller, ActorId::Relay, MsgKind::Packet,
                       serial, SignedRecord::make(sk_, packet), std::nullopt};
    const Bytes payload = encode_sender_commitment({txn_, serial, commit});
    ChannelMessage cmt{ActorId::Controller, ActorId::Relay,
                       MsgKind::SenderCommit, serial,
                       SignedRecord::make(sk_, payload), std::nullopt};

    sent_[serial] = SentCommit{std::move(packet), std::move(indices),
                               std::move(commit)};
    prune();
    return {std::move(pkt), std::move(cmt)};
  }

  const SentCommit* sent(std::uint64_t serial) const {
    const auto it = sent_.find(serial);
    return it == sent_.end() ? nullptr : &it->second;
  }

 private:
  void prune() {
    while (sent_.size() > kWindow)
      sent_.erase(sent_.begin());
  }

  static constexpr std::size_t kWindow = 64;

  SecretKey sk_;
  Address addr_;
  EncryptionKey enc_key_;
  SelectorSeed sel_seed_;
  std::uint64_t txn_;
  std::size_t commit_len_;
  std::uint64_t next_serial_ = 1;
  std::map<std::uint64_t, SentCommit> sent_;
};

// ---------------------------------------------------------------------------

struct DeviceBehavior {
  enum class Kind { Honest, CheatRandomCommit, ReportBenign };
  Kind kind = Kind::Honest;
  std::uint64_t report_at = 0;  // serial to report when Kind::ReportBenign
};

/// Decides whether a decrypted payload looks like an attack. Deterministic;
/// different vendors ship different predicates, which is the whole point of
/// reporting working on any one device.
using InspectionPredicate = std::function<bool(ByteView plaintext)>;

/// Accepts a benign payload iff it carries the application framing prefix.
inline InspectionPredicate command_frame_inspector() {
  return [](ByteView plaintext) {
    static constexpr char kPrefix[] = "CMD ";
    if (plaintext.size() < 4)
      return true;
    return !std::equal(kPrefix, kPrefix + 4, plaintext.begin());
  };
}

/// Device endpoint. Inbound records not signed by the commissioned relay
/// are dropped before anything else sees them; accepted covered packets are
/// committed and held until the cover key arrives.
class Device {
 public:
  struct FinalizeResult {
    enum class Status { Delivered, Reported, Discarded, Ignored };
    Status status = Status::Ignored;
    std::uint64_t serial = 0;
    Bytes plaintext;
  };

  Device(const SecretKey& sk, EncryptionKey k, SelectorSeed s,
         std::uint64_t txn, std::size_t commit_len, const Address& controller,
         const Address& relay, DeviceBehavior behavior,
         InspectionPredicate inspect, SplitMix64 rng,
         std::size_t pending_window = 64)
      : sk_(sk),
        addr_(derive_address(sk)),
        enc_key_(k),
        sel_seed_(s),
        txn_(txn),
        commit_len_(commit_len),
        controller_(controller),
        relay_(relay),
        behavior_(behavior),
        inspect_(std::move(inspect)),
        rng_(rng),
        pending_window_(pending_window) {}

  const Address& address() const { return addr_; }
  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t wrong_key_discards() const { return wrong_key_discards_; }
  std::uint64_t inspected() const { return inspected_; }
  const std::vector<std::pair<std::uint64_t, Bytes>>& delivered() const {
    return delivered_;
  }
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& filed_reports()
      const {
    return filed_reports_;
  }

  /// Covered packet in, receiver commitment out (or a silent drop).
  std::optional<ChannelMessage> receive(const ChannelMessage& msg) {
    if (msg.kind != MsgKind::CoveredPacket)
      return std::nullopt;
    if (msg.record.payload.empty() || msg.record.signer() != relay_) {
      ++dropped_;  // kernel-level filter: never reaches the application
      return std::nullopt;
    }
    if (msg.serial != next_serial_) {
      ++dropped_;
      return std::nullopt;
    }
    const std::uint64_t serial = next_serial_++;
    IndexList indices = select_indices(sel_seed_, serial, commit_len_,
                                       msg.record.payload.size());
    Bytes commit = behavior_.kind == DeviceBehavior::Kind::CheatRandomCommit
                       ? rng_.bytes(commit_len_)
                       : extract_bytes(msg.record.payload, indices);

    Pending pend;
    pend.covered = msg.record.payload;
    pend.relay_sig = msg.record.sig;
    pend.indices = indices;
    pend.commit = commit;
    pending_[serial] = std::move(pend);
    prune();

    const Bytes payload =
        encode_receiver_commitment({txn_, serial, commit, indices});
    return ChannelMessage{ActorId::Device, ActorId::Relay,
                          MsgKind::ReceiverCommit, serial,
                          SignedRecord::make(sk_, payload), std::nullopt};
  }

  /// Cover key in: validate it against the sender commitment when one is
  /// attached, then uncover, decrypt, inspect, and either deliver the
  /// plaintext or report the packet.
  FinalizeResult finalize(const ChannelMessage& msg, Chain& chain) {
    FinalizeResult res;
    if (msg.kind != MsgKind::CoverKeyRelease ||
        msg.record.signer() != relay_)
      return res;
    const auto reveal = decode_cover_key_reveal(msg.record.payload);
    if (!reveal || reveal->txn != txn_)
      return res;
    const auto pit = pending_.find(reveal->serial);
    if (pit == pending_.end())
      return res;
    res.serial = reveal->serial;
    Pending& pend = pit->second;

    // A key that contradicts the sender's signed commitment is noise or
    // worse; drop the packet rather than decrypt garbage.
    if (msg.attached && msg.attached->signer() == controller_) {
      const auto sc = decode_sender_commitment(msg.attached->payload);
      if (sc && sc->serial == reveal->serial &&
          !RelayContract::verify_delivery(sc->commit, pend.commit,
                                          pend.indices, reveal->key)) {
        ++wrong_key_discards_;
        pending_.erase(pit);
        res.status = FinalizeResult::Status::Discarded;
        return res;
      }
    }

    const Bytes uncovered = apply_cover(pend.covered, reveal->key);
    Bytes plaintext = stream_decrypt(enc_key_, reveal->serial, uncovered);
    ++inspected_;
    const bool malicious = inspect_(plaintext);
    const bool force_report =
        behavior_.kind == DeviceBehavior::Kind::ReportBenign &&
        reveal->serial == behavior_.report_at;
    if (malicious || force_report) {
      chain.reporting(addr_, txn_, reveal->serial, pend.covered,
                      pend.relay_sig);
      filed_reports_.emplace_back(txn_, reveal->serial);
      pending_.erase(pit);
      res.status = FinalizeResult::Status::Reported;
      return res;
    }
    delivered_.emplace_back(reveal->serial, plaintext);
    pending_.erase(pit);
    res.status = FinalizeResult::Status::Delivered;
    res.plaintext = std::move(plaintext);
    return res;
  }

  /// Execute the penalty for every report this device has filed.
  std::uint64_t execute_reports(Chain& chain) {
    std::uint64_t total = 0;
    for (const auto& [txn, serial] : filed_reports_) {
      if (chain.contract().has_pending_report(txn, serial))
        total += chain.execute(addr_, txn, serial);
    }
    return total;
  }

  const Bytes* pending_covered(std::uint64_t serial) const {
    const auto it = pending_.find(serial);
    return it == pending_.end() ? nullptr : &it->second.covered;
  }

 private:
  struct Pending {
    Bytes covered;
    Signature relay_sig;
    IndexList indices;
    Bytes commit;
  };

  void prune() {
    while (pending_.size() > pending_window_)
      pending_.erase(pending_.begin());
  }

  SecretKey sk_;
  Address addr_;
  EncryptionKey enc_key_;
  SelectorSeed sel_seed_;
  std::uint64_t txn_;
  std::size_t commit_len_;
  Address controller_;
  Address relay_;
  DeviceBehavior behavior_;
  InspectionPredicate inspect_;
  SplitMix64 rng_;
  std::size_t pending_window_;
  std::uint64_t next_serial_ = 1;
  std::map<std::uint64_t, Pending> pending_;
  std::uint64_t dropped_ = 0;
  std::uint64_t wrong_key_discards_ = 0;
  std::uint64_t inspected_ = 0;
  std::vector<std::pair<std::uint64_t, Bytes>> delivered_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> filed_reports_;
};

// ---------------------------------------------------------------------------

struct RelayBehavior {
  enum class Kind { Honest, Tamper, Inject, WithholdKey };
  Kind kind = Kind::Honest;
  std::size_t tamper_bytes = 0;  // Kind::Tamper: bytes flipped per packet
};

/// Relay endpoint: covers and forwards packets, caches commitment proofs,
/// releases the cover key after local verification, and settles on-chain
/// with only the newest proof.
class Relay {
 public:
  Relay(const SecretKey& sk, std::uint64_t txn, const Address& controller,
        const Address& device, RelayBehavior behavior, SplitMix64 rng)
      : sk_(sk),
        addr_(derive_address(sk)),
        txn_(txn),
        controller_(controller),
        device_(device),
        behavior_(behavior),
        rng_(rng) {}

  const Address& address() const { return addr_; }
  std::uint64_t rejected_inbound() const { return rejected_inbound_; }
  std::uint64_t orphan_commits() const { return orphan_commits_; }
  std::uint64_t withheld() const { return withheld_; }
  std::uint64_t released() const { return released_; }
  std::uint64_t settled_watermark() const { return settled_watermark_; }

  /// Controller-side records. The packet and its commitment arrive as two
  /// records; the packet is covered and forwarded once both are in.
  std::optional<ChannelMessage> on_controller_record(
      const ChannelMessage& msg) {
    if (msg.record.signer() != controller_) {
      ++rejected_inbound_;
      return std::nullopt;
    }
    if (msg.kind == MsgKind::Packet) {
      inbound_packets_[msg.serial] = msg.record;
      return try_forward(msg.serial);
    }
    if (msg.kind == MsgKind::SenderCommit) {
      const auto sc = decode_sender_commitment(msg.record.payload);
      if (!sc || sc->txn != txn_ || sc->serial != msg.serial) {
        ++rejected_inbound_;
        return std::nullopt;
      }
      inbound_commits_[msg.serial] = msg.record;
      return try_forward(msg.serial);
    }
    return std::nullopt;
  }

  /// Fabricate a packet with no controller behind it and push it into the
  /// delivery stream at the next serial the device expects.
  ChannelMessage inject(ByteView attack_payload) {
    const std::uint64_t serial = next_forward_serial_++;
    CacheEntry entry;
    entry.injected = true;
    entry.pn = CoverKey::random(rng_);
    const Bytes covered = apply_cover(attack_payload, entry.pn);
    SignedRecord rec = SignedRecord::make(sk_, covered);
    cache_[serial] = std::move(entry);
    return ChannelMessage{ActorId::Relay, ActorId::Device,
                          MsgKind::CoveredPacket, serial, std::move(rec),
                          std::nullopt};
  }

  /// Receiver commitment in: verify both commitments against the cached
  /// cover key, release the key on success, stay silent otherwise.
  std::optional<ChannelMessage> on_receiver_commit(const ChannelMessage& msg) {
    if (msg.kind != MsgKind::ReceiverCommit ||
        msg.record.signer() != device_) {
      ++rejected_inbound_;
      return std::nullopt;
    }
    const auto rc = decode_receiver_commitment(msg.record.payload);
    if (!rc || rc->txn != txn_) {
      ++rejected_inbound_;
      return std::nullopt;
    }
    const auto cit = cache_.find(rc->serial);
    if (cit == cache_.end()) {
      ++orphan_commits_;  // no cached cover key for this serial
      return std::nullopt;
    }
    CacheEntry& entry = cit->second;
    entry.receiver_commit = msg.record;

    if (entry.injected) {
      // nothing to verify and nothing to settle; hand over the key so the
      // payload gets processed
      return release_message(rc->serial, entry);
    }

    const auto sc = decode_sender_commitment(entry.sender_commit->payload);
    const bool ok = sc && RelayContract::verify_delivery(
                              sc->commit, rc->commit, rc->indices, entry.pn);
    if (!ok) {
      ++withheld_;
      return std::nullopt;
    }
    entry.cashable = true;
    if (behavior_.kind == RelayBehavior::Kind::WithholdKey) {
      ++withheld_;
      return std::nullopt;
    }
    return release_message(rc->serial, entry);
  }

  /// Settle everything up to the newest verified proof with a single call.
  /// Earlier proofs never need to be posted.
  std::optional<std::uint64_t> cash_out(Chain& chain) {
    const CacheEntry* newest = nullptr;
    std::uint64_t serial = 0;
    for (const auto& [s, entry] : cache_) {
      if (entry.cashable && s > serial) {
        serial = s;
        newest = &entry;
      }
    }
    if (!newest)
      return std::nullopt;
    ProofTriple triple;
    triple.txn = txn_;
    triple.serial = serial;
    triple.sender_commit = *newest->sender_commit;
    triple.receiver_commit = *newest->receiver_commit;
    triple.cover_reveal =
        SignedRecord::make(sk_, encode_cover_key_reveal({txn_, serial,
                                                         newest->pn}));
    const std::uint64_t payment = chain.settle(addr_, triple, txn_);
    settled_watermark_ = serial;
    return payment;
  }

  /// Defend against a pending report. An honest relay holds the sender's
  /// signature over the uncovered packet and the true cover key; a relay
  /// that injected the packet holds neither and can only forge.
  RebutOutcome rebut(std::uint64_t serial, Chain& chain) {
    const auto cit = cache_.find(serial);
    if (cit == cache_.end())
      throw std::invalid_argument("relay: nothing cached for this serial");
    const CacheEntry& entry = cit->second;
    if (!entry.injected && entry.packet_record) {
      return chain.rebutting(addr_, txn_, serial, entry.packet_record->sig,
                             entry.pn);
    }
    // forged defense: sign the uncovered bytes ourselves and hope
    const PendingReport* rep = chain.contract().find_report(txn_, serial);
    const Bytes uncovered =
        rep ? apply_cover(rep->packet, entry.pn) : Bytes{};
    const Signature forged = sign(sk_, uncovered);
    return chain.rebutting(addr_, txn_, serial, forged, entry.pn);
  }

  const CoverKey* cover_key(std::uint64_t serial) const {
    const auto it = cache_.find(serial);
    return it == cache_.end() ? nullptr : &it->second.pn;
  }

  bool has_cashable() const {
    for (const auto& [s, entry] : cache_)
      if (entry.cashable)
        return true;
    return false;
  }

 private:
  struct CacheEntry {
    std::optional<SignedRecord> packet_record;  // controller's signed packet
    std::optional<SignedRecord> sender_commit;
    std::optional<SignedRecord> receiver_commit;
    CoverKey pn;
    bool injected = false;
    bool cashable = false;
  };

  std::optional<ChannelMessage> try_forward(std::uint64_t serial) {
    const auto pit = inbound_packets_.find(serial);
    const auto cit = inbound_commits_.find(serial);
    if (pit == inbound_packets_.end() || cit == inbound_commits_.end())
      return std::nullopt;

    CacheEntry entry;
    entry.packet_record = pit->second;
    entry.sender_commit = cit->second;
    entry.pn = CoverKey::random(rng_);

    Bytes payload = pit->second.payload;
    if (behavior_.kind == RelayBehavior::Kind::Tamper && !payload.empty()) {
      const std::size_t m = std::min(behavior_.tamper_bytes, payload.size());
      // m distinct positions, each byte genuinely changed
      std::map<std::size_t, bool> picked;
      while (picked.size() < m)
        picked[rng_.below(payload.size())] = true;
      for (const auto& [pos, unused] : picked)
        payload[pos] ^= static_cast<std::uint8_t>(1 + rng_.below(255));
    }
    const Bytes covered = apply_cover(payload, entry.pn);
    SignedRecord rec = SignedRecord::make(sk_, covered);

    cache_[serial] = std::move(entry);
    inbound_packets_.erase(pit);
    inbound_commits_.erase(cit);
    next_forward_serial_ = std::max(next_forward_serial_, serial + 1);
    return ChannelMessage{ActorId::Relay, ActorId::Device,
                          MsgKind::CoveredPacket, serial, std::move(rec),
                          std::nullopt};
  }

  ChannelMessage release_message(std::uint64_t serial, CacheEntry& entry) {
    ++released_;
    SignedRecord rec = SignedRecord::make(
        sk_, encode_cover_key_reveal({txn_, serial, entry.pn}));
    std::optional<SignedRecord> attached = entry.sender_commit;
    return ChannelMessage{ActorId::Relay, ActorId::Device,
                          MsgKind::CoverKeyRelease, serial, std::move(rec),
                          std::move(attached)};
  }

  SecretKey sk_;
  Address addr_;
  std::uint64_t txn_;
  Address controller_;
  Address device_;
  RelayBehavior behavior_;
  SplitMix64 rng_;
  std::map<std::uint64_t, SignedRecord> inbound_packets_;
  std::map<std::uint64_t, SignedRecord> inbound_commits_;
  std::map<std::uint64_t, CacheEntry> cache_;
  std::uint64_t next_forward_serial_ = 1;
  std::uint64_t settled_watermark_ = 0;
  std::uint64_t withheld_ = 0;
  std::uint64_t released_ = 0;
  std::uint64_t rejected_inbound_ = 0;
  std::uint64_t orphan_commits_ = 0;
};

}  // namespace rsiot
