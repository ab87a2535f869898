// SPDX-License-Identifier: Apache-2.0
//
// irsbeam: joint active/passive beamforming simulator for IRS-assisted radar
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

// Command-line front end. Subcommands:
//   sweep     run a Monte Carlo power sweep and emit CSV/text tables
//   design    run every requested design on one realization and print it
//   validate  check a scenario config file
// Exit codes: 0 success, 1 configuration error, 2 runtime/solver error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irsbeam/harness.hpp"

namespace {

using namespace irsbeam;

// Thrown for failures that are the environment's fault rather than the
// user's (unreadable/unwritable files, solver breakdowns).
struct runtime_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw runtime_failure("error while reading: " + path);
  return buf.str();
}

Scenario make_scenario(const std::string& path, const std::string& preset) {
  Scenario s = path.empty() ? desk_scenario() : load_scenario(read_file(path));
  if (preset != "custom") apply_clutter_preset(s, preset);
  validate(s);
  return s;
}

std::vector<DesignKind> parse_design_list(const std::string& csv) {
  std::vector<DesignKind> out;
  std::istringstream in(csv);
  for (std::string name; std::getline(in, name, ',');)
    out.push_back(parse_design(name));
  if (out.empty()) throw invalid_input("designs: empty list");
  return out;
}

std::vector<double> kappa_grid(double start, double stop, int steps) {
  if (steps < 1) throw invalid_input("kappa-steps must be >= 1");
  std::vector<double> grid;
  if (steps == 1) {
    grid.push_back(start);
    return grid;
  }
  for (int i = 0; i < steps; ++i)
    grid.push_back(start + (stop - start) * i / (steps - 1));
  return grid;  // run_sweep validation enforces strict increase
}

void write_output(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw runtime_failure("cannot open output file: " + path);
  out << body;
  out.flush();
  if (!out) throw runtime_failure("error while writing: " + path);
}

void print_design_result(const std::string& name, const DesignResult& res) {
  std::cout << "design=" << name << " status=" << to_string(res.status)
            << " min_power_watts=" << res.min_power()
            << " iterations=" << res.iterations
            << " passive_steps_skipped=" << res.passive_steps_skipped << "\n";
  std::cout << "  trajectory=";
  for (std::size_t i = 0; i < res.min_power_trajectory.size(); ++i)
    std::cout << (i ? "," : "") << res.min_power_trajectory[i];
  std::cout << "\n  per_target_power=";
  for (int i = 0; i < res.per_target_power.size(); ++i)
    std::cout << (i ? "," : "") << res.per_target_power(i);
  std::cout << "\n  per_clutter_power=";
  for (int i = 0; i < res.per_clutter_power.size(); ++i)
    std::cout << (i ? "," : "") << res.per_clutter_power(i);
  std::cout << "\n  beamformer=";
  for (int i = 0; i < res.beamformer.t.size(); ++i) {
    const cxd v = res.beamformer.t(i);
    std::cout << (i ? "," : "") << v.real()
              << (v.imag() < 0 ? "" : "+") << v.imag() << "i";
  }
  std::cout << "\n  phases_rad=";
  const VecX phases = res.phases.phases();
  for (int i = 0; i < phases.size(); ++i)
    std::cout << (i ? "," : "") << phases(i);
  std::cout << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{
      "Joint transmit/reflect-surface beamforming designer and Monte Carlo "
      "sweep driver"};
  app.require_subcommand(1);

  // --- sweep ---------------------------------------------------------------
  std::string sw_scenario, sw_preset = "custom";
  std::string sw_designs = "joint,active_only,passive_only,no_irs";
  double sw_start = 0.05, sw_stop = 0.25;
  int sw_steps = 5, sw_realizations = 50, sw_workers = 1;
  std::uint64_t sw_seed = 0;
  std::string sw_out, sw_format = "csv";
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep");
  sweep->add_option("--scenario", sw_scenario,
                    "scenario config file (default: built-in desk profile)");
  sweep->add_option("--preset", sw_preset, "clutter layout preset")
      ->check(CLI::IsMember({"q3", "q9", "custom"}));
  sweep->add_option("--designs", sw_designs,
                    "comma-separated subset of "
                    "joint,active_only,passive_only,no_irs");
  sweep->add_option("--kappa-start", sw_start, "first transmit power (W)");
  sweep->add_option("--kappa-stop", sw_stop, "last transmit power (W)");
  sweep->add_option("--kappa-steps", sw_steps, "number of grid points");
  sweep->add_option("--realizations", sw_realizations,
                    "random realizations per (design, power) cell");
  CLI::Option* sw_seed_opt =
      sweep->add_option("--seed", sw_seed, "override the scenario seed");
  sweep->add_option("--workers", sw_workers, "concurrent realizations");
  sweep->add_option("--out", sw_out, "output path (default: stdout)");
  sweep->add_option("--format", sw_format, "output format")
      ->check(CLI::IsMember({"csv", "text"}));

  // --- design --------------------------------------------------------------
  std::string dg_scenario, dg_designs = "joint";
  std::uint64_t dg_seed = 0;
  CLI::App* design = app.add_subcommand(
      "design", "run one realization and print the design result");
  design->add_option("--scenario", dg_scenario,
                     "scenario config file (default: built-in desk profile)");
  CLI::Option* dg_seed_opt =
      design->add_option("--seed", dg_seed, "override the scenario seed");
  design->add_option("--designs", dg_designs,
                     "comma-separated subset of "
                     "joint,active_only,passive_only,no_irs");

  // --- validate ------------------------------------------------------------
  std::string vl_scenario;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a scenario config file");
  validate_cmd->add_option("--scenario", vl_scenario, "scenario config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // app.exit prints the message/help; fold CLI11's code space into ours.
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (sweep->parsed()) {
    SweepSpec spec;
    spec.scenario = make_scenario(sw_scenario, sw_preset);
    if (*sw_seed_opt) spec.scenario.seed = sw_seed;
    spec.designs = parse_design_list(sw_designs);
    spec.kappa_values = kappa_grid(sw_start, sw_stop, sw_steps);
    spec.realizations = sw_realizations;
    spec.workers = sw_workers;
    const MetricsReport report = run_sweep(spec);
    write_output(sw_out, emit_report(report, sw_format == "csv"
                                                 ? ReportFormat::csv
                                                 : ReportFormat::text));
    return 0;
  }

  if (design->parsed()) {
    Scenario s = make_scenario(dg_scenario, "custom");
    if (*dg_seed_opt) s.seed = dg_seed;
    Rng ch_rng(Rng::derive(s.seed, {1, 0}));
    const std::vector<Vec2> targets = sample_target_positions(s, s.L, ch_rng);
    const ChannelSet ch = realize_channels(s, targets, ch_rng);
    std::cout << "targets=";
    for (std::size_t i = 0; i < targets.size(); ++i)
      std::cout << (i ? " " : "") << "(" << targets[i].x() << ","
                << targets[i].y() << ")";
    std::cout << " channel_hash=" << channel_hash(ch) << "\n";
    const std::uint64_t task_seed = Rng::derive(s.seed, {2, 0, 0});
    for (DesignKind kind : parse_design_list(dg_designs)) {
      Rng rng(task_seed);
      print_design_result(to_string(kind),
                          detail::run_one_design(kind, ch, s, rng));
    }
    return 0;
  }

  const Scenario s = load_scenario(read_file(vl_scenario));
  std::cout << "ok: M=" << s.M << " N=" << s.N << " K=" << s.num_irs()
            << " L=" << s.L << " Q=" << s.num_clutter()
            << " kappa_watts=" << s.kappa_watts << " seed=" << s.seed << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const invalid_input& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
