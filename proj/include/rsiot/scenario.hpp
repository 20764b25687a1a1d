// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "rsiot/actors.hpp"

namespace rsiot {

/// Everything that determines a run. Same scenario + same seed means the
/// same transcript, byte for byte.
struct Scenario {
  std::string name = "honest";
  std::uint64_t seed = 1;

  std::string controller_behavior = "honest";
  std::string device_behavior = "honest";  // honest | cheat | report_benign
  std::string relay_behavior = "honest";   // honest | tamper[:m] | inject | withhold_pn

  std::uint64_t packets = 100;
  std::size_t packet_size = 100;
  std::string payload_class = "command";  // command | random
  std::uint64_t report_at = 0;            // serial reported by report_benign
  std::uint64_t blocks_per_packet = 1;

  std::uint64_t price = 2;
  std::uint64_t prepaid = 1000;
  std::uint64_t deposit = 1'000'000;
  std::uint64_t min_deposit = 1'000'000;
  std::uint64_t initial_funds = 10'000'000;

  std::uint64_t grace_blocks = 10;
  std::uint64_t billing_window_blocks = 10;
  std::size_t commitment_length = 32;
  std::string gas_table_path;

  static std::vector<std::string> builtin_names() {
    return {"honest",     "malicious_relay_inject", "malicious_reporting",
            "cheat_user", "tamper",                 "withhold_pn"};
  }

  static Scenario builtin(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "honest") {
      // defaults as-is: 100 packets, honest everyone
    } else if (name == "malicious_relay_inject") {
      s.packets = 3;
      s.relay_behavior = "inject";
    } else if (name == "malicious_reporting") {
      s.packets = 3;
      s.device_behavior = "report_benign";
      s.report_at = 2;
    } else if (name == "cheat_user") {
      s.packets = 5;
      s.device_behavior = "cheat_user";
    } else if (name == "tamper") {
      s.packets = 5;
      s.relay_behavior = "tamper";  // tamper every byte: detection is certain
    } else if (name == "withhold_pn") {
      s.packets = 5;
      s.relay_behavior = "withhold_pn";
    } else {
      throw std::invalid_argument("unknown builtin scenario: " + name);
    }
    return s;
  }

  /// Line-oriented `key = value` format with [section] headers. Sections:
  /// scenario, actors, traffic, economics, chain. Unknown keys are errors.
  /// A builtin `name` pulls in that builtin's defaults; every other key in
  /// the file overrides them regardless of order.
  static Scenario parse(std::istream& in) {
    struct Entry {
      std::string key, value;
      std::size_t lineno;
    };
    std::vector<Entry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';')
        continue;
      if (t.front() == '[' && t.back() == ']') {
        const std::string section = t.substr(1, t.size() - 2);
        if (section != "scenario" && section != "actors" &&
            section != "traffic" && section != "economics" &&
            section != "chain")
          throw std::invalid_argument(err(lineno, "unknown section '" +
                                                      section + "'"));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument(err(lineno, "expected key = value"));
      entries.push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno});
    }

    Scenario s;
    bool name_set = false;
    for (const auto& e : entries) {
      if (e.key == "name") {
        s = is_builtin(e.value) ? builtin(e.value) : Scenario{};
        s.name = e.value;
        name_set = true;
      }
    }
    if (!name_set)
      throw std::invalid_argument("scenario file: missing 'name'");

    for (const auto& e : entries) {
      const std::string& key = e.key;
      const std::string& value = e.value;
      const std::size_t lineno = e.lineno;
      if (key == "name") {
        // already applied
      } else if (key == "seed") {
        s.seed = to_u64(value, lineno);
      } else if (key == "controller") {
        s.controller_behavior = value;
      } else if (key == "device") {
        s.device_behavior = value;
      } else if (key == "relay") {
        s.relay_behavior = value;
      } else if (key == "report_at") {
        s.report_at = to_u64(value, lineno);
      } else if (key == "packets") {
        s.packets = to_u64(value, lineno);
      } else if (key == "packet_size") {
        s.packet_size = to_u64(value, lineno);
      } else if (key == "payload") {
        if (value != "command" && value != "random")
          throw std::invalid_argument(err(lineno, "payload must be command or random"));
        s.payload_class = value;
      } else if (key == "blocks_per_packet") {
        s.blocks_per_packet = to_u64(value, lineno);
      } else if (key == "price") {
        s.price = to_u64(value, lineno);
      } else if (key == "prepaid") {
        s.prepaid = to_u64(value, lineno);
      } else if (key == "deposit") {
        s.deposit = to_u64(value, lineno);
      } else if (key == "min_deposit") {
        s.min_deposit = to_u64(value, lineno);
      } else if (key == "initial_funds") {
        s.initial_funds = to_u64(value, lineno);
      } else if (key == "grace_blocks") {
        s.grace_blocks = to_u64(value, lineno);
      } else if (key == "billing_window_blocks") {
        s.billing_window_blocks = to_u64(value, lineno);
      } else if (key == "commitment_length") {
        s.commitment_length = to_u64(value, lineno);
      } else if (key == "gas_table") {
        s.gas_table_path = value;
      } else {
        throw std::invalid_argument(err(lineno, "unknown key '" + key + "'"));
      }
    }
    s.validate();
    return s;
  }

  static Scenario parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("cannot open scenario file: " + path);
    return parse(in);
  }

  static bool is_builtin(const std::string& name) {
    for (const auto& b : builtin_names())
      if (b == name)
        return true;
    return false;
  }

  void validate() const {
    if (packets == 0)
      throw std::invalid_argument("scenario: packets must be >= 1");
    if (packet_size == 0)
      throw std::invalid_argument("scenario: packet_size must be >= 1");
    if (payload_class == "command" && packet_size < 8)
      throw std::invalid_argument(
          "scenario: command payloads need packet_size >= 8");
    if (commitment_length == 0)
      throw std::invalid_argument("scenario: commitment_length must be >= 1");
    if (deposit < min_deposit)
      throw std::invalid_argument("scenario: deposit below min_deposit");
    if (initial_funds < deposit || initial_funds < prepaid)
      throw std::invalid_argument("scenario: initial_funds cannot fund the run");
    parse_device_behavior();  // throws on junk
    parse_relay_behavior();
    if (controller_behavior != "honest")
      throw std::invalid_argument("scenario: controller only models honest");
    if (device_behavior == "report_benign" &&
        (report_at == 0 || report_at > packets))
      throw std::invalid_argument(
          "scenario: report_benign needs report_at in [1, packets]");
  }

  DeviceBehavior parse_device_behavior() const {
    DeviceBehavior b;
    if (device_behavior == "honest") {
      b.kind = DeviceBehavior::Kind::Honest;
    } else if (device_behavior == "cheat_user" || device_behavior == "cheat") {
      b.kind = DeviceBehavior::Kind::CheatRandomCommit;
    } else if (device_behavior == "report_benign") {
      b.kind = DeviceBehavior::Kind::ReportBenign;
      b.report_at = report_at;
    } else {
      throw std::invalid_argument("scenario: unknown device behavior '" +
                                  device_behavior + "'");
    }
    return b;
  }

  RelayBehavior parse_relay_behavior() const {
    RelayBehavior b;
    if (relay_behavior == "honest") {
      b.kind = RelayBehavior::Kind::Honest;
    } else if (relay_behavior == "inject") {
      b.kind = RelayBehavior::Kind::Inject;
    } else if (relay_behavior == "withhold_pn") {
      b.kind = RelayBehavior::Kind::WithholdKey;
    } else if (relay_behavior.starts_with("tamper")) {
      b.kind = RelayBehavior::Kind::Tamper;
      if (relay_behavior == "tamper") {
        b.tamper_bytes = packet_size;  // every byte: detection is certain
      } else {
        // both tamper:<m> and tamper(<m>) are accepted
        std::string arg;
        if (relay_behavior.starts_with("tamper:")) {
          arg = relay_behavior.substr(7);
        } else if (relay_behavior.starts_with("tamper(") &&
                   relay_behavior.back() == ')') {
          arg = relay_behavior.substr(7, relay_behavior.size() - 8);
        } else {
          throw std::invalid_argument("scenario: unknown relay behavior '" +
                                      relay_behavior + "'");
        }
        try {
          b.tamper_bytes = std::stoull(arg);
        } catch (const std::exception&) {
          throw std::invalid_argument("scenario: bad tamper byte count '" +
                                      arg + "'");
        }
        if (b.tamper_bytes == 0 || b.tamper_bytes > packet_size)
          throw std::invalid_argument(
              "scenario: tamper byte count must be in [1, packet_size]");
      }
    } else {
      throw std::invalid_argument("scenario: unknown relay behavior '" +
                                  relay_behavior + "'");
    }
    return b;
  }

  std::string config_lines() const {
    std::ostringstream out;
    out << "config name=" << name << " seed=" << seed << "\n"
        << "config controller=" << controller_behavior
        << " device=" << device_behavior << " relay=" << relay_behavior
        << " report_at=" << report_at << "\n"
        << "config packets=" << packets << " packet_size=" << packet_size
        << " payload=" << payload_class
        << " blocks_per_packet=" << blocks_per_packet << "\n"
        << "config price=" << price << " prepaid=" << prepaid
        << " deposit=" << deposit << " min_deposit=" << min_deposit
        << " initial_funds=" << initial_funds << "\n"
        << "config grace_blocks=" << grace_blocks
        << " billing_window_blocks=" << billing_window_blocks
        << " commitment_length=" << commitment_length << "\n";
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

  static std::string err(std::size_t lineno, const std::string& what) {
    return "scenario file line " + std::to_string(lineno) + ": " + what;
  }

  static std::uint64_t to_u64(const std::string& s, std::size_t lineno) {
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(s, &pos);
      if (pos != s.size())
        throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(err(lineno, "bad integer '" + s + "'"));
    }
  }
};

}  // namespace rsiot
