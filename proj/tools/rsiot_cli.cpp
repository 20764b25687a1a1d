// Copyright 2026 the rsiot developers. Licensed under the
// Apache License, Version 2.0. See the COPYING file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rsiot/gas_report.hpp"
#include "rsiot/harness.hpp"
#include "rsiot/montecarlo.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& scenario_arg, std::optional<std::uint64_t> seed,
            const std::string& gas_table, const std::string& out_dir) {
  rsiot::Scenario scenario;
  if (std::filesystem::exists(scenario_arg))
    scenario = rsiot::Scenario::parse_file(scenario_arg);
  else if (rsiot::Scenario::is_builtin(scenario_arg))
    scenario = rsiot::Scenario::builtin(scenario_arg);
  else
    throw std::runtime_error("no such scenario file or builtin: " +
                             scenario_arg);
  if (seed)
    scenario.seed = *seed;
  if (!gas_table.empty())
    scenario.gas_table_path = gas_table;

  const rsiot::RunResult res = rsiot::run_scenario(scenario);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_file(dir / "transcript.txt", res.transcript);
    write_file(dir / "contract_state.txt", res.contract_state);
    write_file(dir / "events.txt", res.events);
    write_file(dir / "gas_receipts.txt", res.receipts);
  }

  std::cout << "scenario " << scenario.name << " seed=" << scenario.seed
            << "\n"
            << "verdict " << (res.pass ? "pass" : "FAIL") << "\n"
            << "  expected " << res.expected << "\n"
            << "  actual   " << res.actual << "\n"
            << "relay_revenue=" << res.relay_revenue
            << " device_refund=" << res.device_refund
            << " penalty_paid=" << res.penalty_paid
            << " delivered=" << res.delivered << " gas_total=" << res.gas_total
            << "\n";
  for (const auto& [role, value] : res.balances)
    std::cout << "balance " << role << "=" << value << "\n";
  if (out_dir.empty())
    std::cout << "(pass --out DIR to keep the transcript and state dumps)\n";
  return res.pass ? 0 : 1;
}

int cmd_tamper_mc(std::size_t l, std::size_t n, std::size_t m,
                  std::uint64_t trials, std::uint64_t seed) {
  const auto res = rsiot::monte_carlo_tamper(l, n, m, trials, seed);
  std::cout << "l=" << res.packet_len << " n=" << res.commit_len
            << " m=" << res.tampered << " trials=" << res.trials << "\n"
            << "detected=" << res.detected << "\n"
            << "rate=" << std::fixed << std::setprecision(6) << res.rate
            << "\n"
            << "closed_form=" << res.closed_form << "\n"
            << "abs_error=" << std::abs(res.rate - res.closed_form) << "\n";
  return 0;
}

int cmd_gas_report(const std::string& transcript_path,
                   const std::string& gas_table) {
  std::ifstream in(transcript_path);
  if (!in)
    throw std::runtime_error("cannot open transcript: " + transcript_path);
  const rsiot::GasSummary sum = rsiot::summarize_gas(in);
  const rsiot::GasTable table = gas_table.empty()
                                    ? rsiot::GasTable::defaults()
                                    : rsiot::GasTable::load_file(gas_table);
  std::cout << rsiot::format_gas_report(sum, table);
  return 0;
}

int cmd_list_scenarios() {
  for (const auto& name : rsiot::Scenario::builtin_names()) {
    const rsiot::Scenario s = rsiot::Scenario::builtin(name);
    std::cout << name << "  (packets=" << s.packets
              << " device=" << s.device_behavior
              << " relay=" << s.relay_behavior << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relay-sharing trading and proof-of-delivery simulator"};
  app.require_subcommand(1);

  // run
  std::string scenario_arg;
  std::string gas_table;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "execute a scenario and judge it");
  run->add_option("scenario", scenario_arg,
                  "scenario file path or builtin name")
      ->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--gas-table", gas_table, "gas table file");
  run->add_option("--out", out_dir, "directory for transcript and dumps");

  // tamper-mc
  std::size_t mc_l = 1000, mc_n = 32, mc_m = 1;
  std::uint64_t mc_trials = 100000, mc_seed = 1;
  auto* mc = app.add_subcommand(
      "tamper-mc", "tamper-detection Monte Carlo vs the closed form");
  mc->add_option("--l", mc_l, "packet length")->required();
  mc->add_option("--n", mc_n, "commitment length")->required();
  mc->add_option("--m", mc_m, "tampered bytes")->required();
  mc->add_option("--trials", mc_trials, "trial count")->required();
  mc->add_option("--seed", mc_seed, "master seed");

  // gas-report
  std::string transcript_path;
  std::string report_gas_table;
  auto* gr = app.add_subcommand("gas-report",
                                "summarize gas from a transcript file");
  gr->add_option("transcript", transcript_path, "transcript file")->required();
  gr->add_option("--gas-table", report_gas_table,
                 "gas table file for the currency conversion");

  auto* ls = app.add_subcommand("list-scenarios", "list builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(scenario_arg, seed, gas_table, out_dir);
    if (mc->parsed())
      return cmd_tamper_mc(mc_l, mc_n, mc_m, mc_trials, mc_seed);
    if (gr->parsed())
      return cmd_gas_report(transcript_path, report_gas_table);
    if (ls->parsed())
      return cmd_list_scenarios();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
