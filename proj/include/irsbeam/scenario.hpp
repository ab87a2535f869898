// SPDX-License-Identifier: Apache-2.0
//
// irsbeam: joint active/passive beamforming simulator for IRS-assisted radar
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsbeam/common.hpp"
#include "irsbeam/rng.hpp"

namespace irsbeam {

// Axis-aligned rectangle the targets are drawn from.
struct TargetBox {
  double x_min = -75.0;
  double x_max = 75.0;
  double y_min = 150.0;
  double y_max = 250.0;
};

// Full description of one simulated deployment. Defaults reproduce the
// reference geometry: a 64-element transmit array at the origin, two
// 100-element reflecting surfaces, and three clutter objects on a line in
// front of the target region. The number of targets L has no canonical
// value; 2 is this project's default and any study should set it explicitly.
struct Scenario {
  int M = 64;                     // transmit array elements
  int N = 100;                    // reflecting elements per surface
  int L = 2;                      // targets per realization
  Vec2 tx_position{0.0, 0.0};
  std::vector<Vec2> irs_positions{Vec2(-130.0, 75.0), Vec2(130.0, 75.0)};
  std::vector<Vec2> clutter_positions{Vec2(-75.0, 125.0), Vec2(0.0, 125.0),
                                      Vec2(75.0, 125.0)};
  TargetBox target_box;
  double kappa_watts = 1.0;       // transmit power budget
  std::vector<double> eta_watts{0.5e-6, 0.5e-6, 0.5e-6};  // clutter caps
  double epsilon = 1.0e-3;        // relative convergence tolerance
  int trials_I = 5000;            // randomization candidates per rounding
  int max_iterations = 20;        // alternation rounds J_max
  double blockage_threshold_watts = 0.5e-6;
  double pathloss_a = 64.0;       // intercept [dB at 1 m]
  double pathloss_b = 2.0;        // distance exponent (10*b dB per decade)
  double pathloss_sigma_db = 5.8; // lognormal shadowing std dev
  std::uint64_t seed = 1;

  int num_irs() const { return static_cast<int>(irs_positions.size()); }
  int num_clutter() const { return static_cast<int>(clutter_positions.size()); }
};

// Checks every documented invariant; throws invalid_input naming the first
// violated one.
inline void validate(const Scenario& s) {
  if (s.M < 1) throw invalid_input("scenario: M must be >= 1");
  if (s.N < 1) throw invalid_input("scenario: N must be >= 1");
  if (s.L < 1) throw invalid_input("scenario: L must be >= 1");
  if (s.irs_positions.empty())
    throw invalid_input("scenario: at least one IRS position is required");
  if (s.eta_watts.size() != s.clutter_positions.size())
    throw invalid_input(
        "scenario: eta_watts length must equal clutter_positions length");
  if (!(s.kappa_watts > 0.0))
    throw invalid_input("scenario: kappa_watts must be > 0");
  for (double e : s.eta_watts)
    if (!(e > 0.0)) throw invalid_input("scenario: eta_watts entries must be > 0");
  if (!(s.epsilon > 0.0)) throw invalid_input("scenario: epsilon must be > 0");
  if (s.trials_I < 1) throw invalid_input("scenario: trials_I must be >= 1");
  if (s.max_iterations < 1)
    throw invalid_input("scenario: max_iterations must be >= 1");
  if (!(s.target_box.x_max > s.target_box.x_min) ||
      !(s.target_box.y_max > s.target_box.y_min))
    throw invalid_input("scenario: target_box must have positive area");
  if (s.blockage_threshold_watts < 0.0)
    throw invalid_input("scenario: blockage_threshold_watts must be >= 0");
  if (s.pathloss_sigma_db < 0.0)
    throw invalid_input("scenario: pathloss_sigma_db must be >= 0");
}

namespace detail {

inline Vec2 parse_point(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw invalid_input("scenario: " + key + " must be a [x, y] pair");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

inline std::vector<Vec2> parse_points(const nlohmann::json& j,
                                      const std::string& key) {
  if (!j.is_array())
    throw invalid_input("scenario: " + key + " must be a list of [x, y] pairs");
  std::vector<Vec2> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(parse_point(e, key));
  return out;
}

}  // namespace detail

// Parses a scenario config document (JSON object, flat key/value schema).
// Absent keys keep their defaults; unknown keys are rejected so typos are
// caught instead of silently ignored. The result is validated.
inline Scenario load_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("scenario: config is not valid JSON: ") +
                        e.what());
  }
  if (!j.is_object())
    throw invalid_input("scenario: config root must be an object");

  static const std::set<std::string> known = {
      "tx_position", "irs_positions", "clutter_positions", "target_box",
      "M", "N", "L", "kappa_watts", "eta_watts", "epsilon", "trials_I",
      "max_iterations", "blockage_threshold_watts", "pathloss_a",
      "pathloss_b", "pathloss_sigma_db", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw invalid_input("scenario: unknown config key '" + it.key() + "'");

  Scenario s;
  try {
    if (j.contains("tx_position"))
      s.tx_position = detail::parse_point(j["tx_position"], "tx_position");
    if (j.contains("irs_positions"))
      s.irs_positions = detail::parse_points(j["irs_positions"], "irs_positions");
    if (j.contains("clutter_positions")) {
      s.clutter_positions =
          detail::parse_points(j["clutter_positions"], "clutter_positions");
      // Clutter caps must be given per object once the layout changes; keep a
      // uniform default so a bare layout edit stays loadable.
      if (!j.contains("eta_watts"))
        s.eta_watts.assign(s.clutter_positions.size(), 0.5e-6);
    }
    if (j.contains("target_box")) {
      const auto& b = j["target_box"];
      if (!b.is_array() || b.size() != 4)
        throw invalid_input(
            "scenario: target_box must be [x_min, x_max, y_min, y_max]");
      s.target_box = TargetBox{b[0].get<double>(), b[1].get<double>(),
                               b[2].get<double>(), b[3].get<double>()};
    }
    if (j.contains("M")) s.M = j["M"].get<int>();
    if (j.contains("N")) s.N = j["N"].get<int>();
    if (j.contains("L")) s.L = j["L"].get<int>();
    if (j.contains("kappa_watts")) s.kappa_watts = j["kappa_watts"].get<double>();
    if (j.contains("eta_watts"))
      s.eta_watts = j["eta_watts"].get<std::vector<double>>();
    if (j.contains("epsilon")) s.epsilon = j["epsilon"].get<double>();
    if (j.contains("trials_I")) s.trials_I = j["trials_I"].get<int>();
    if (j.contains("max_iterations"))
      s.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("blockage_threshold_watts"))
      s.blockage_threshold_watts = j["blockage_threshold_watts"].get<double>();
    if (j.contains("pathloss_a")) s.pathloss_a = j["pathloss_a"].get<double>();
    if (j.contains("pathloss_b")) s.pathloss_b = j["pathloss_b"].get<double>();
    if (j.contains("pathloss_sigma_db"))
      s.pathloss_sigma_db = j["pathloss_sigma_db"].get<double>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("scenario: malformed value: ") + e.what());
  }
  validate(s);
  return s;
}

// Serializes a scenario with the exact config schema; load_scenario of the
// result reproduces the scenario bit for bit.
inline std::string save_scenario(const Scenario& s) {
  nlohmann::ordered_json j;
  j["tx_position"] = {s.tx_position.x(), s.tx_position.y()};
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : s.irs_positions) points.push_back({p.x(), p.y()});
  j["irs_positions"] = points;
  points = nlohmann::ordered_json::array();
  for (const auto& p : s.clutter_positions) points.push_back({p.x(), p.y()});
  j["clutter_positions"] = points;
  j["target_box"] = {s.target_box.x_min, s.target_box.x_max, s.target_box.y_min,
                     s.target_box.y_max};
  j["M"] = s.M;
  j["N"] = s.N;
  j["L"] = s.L;
  j["kappa_watts"] = s.kappa_watts;
  j["eta_watts"] = s.eta_watts;
  j["epsilon"] = s.epsilon;
  j["trials_I"] = s.trials_I;
  j["max_iterations"] = s.max_iterations;
  j["blockage_threshold_watts"] = s.blockage_threshold_watts;
  j["pathloss_a"] = s.pathloss_a;
  j["pathloss_b"] = s.pathloss_b;
  j["pathloss_sigma_db"] = s.pathloss_sigma_db;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

// Draws `count` target positions uniformly over the target box. A degenerate
// box (zero width or height on either axis) is allowed here and collapses the
// corresponding coordinate; scenario validation is the caller's concern.
// Draw order is fixed (x then y per point) so streams are reproducible.
inline std::vector<Vec2> sample_target_positions(const Scenario& s, int count,
                                                 Rng& rng) {
  if (count < 1) throw invalid_input("sample_target_positions: count must be >= 1");
  const TargetBox& b = s.target_box;
  if (!(b.x_max >= b.x_min) || !(b.y_max >= b.y_min))
    throw invalid_input("sample_target_positions: malformed target_box");
  std::vector<Vec2> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double x = b.x_min + (b.x_max - b.x_min) * rng.uniform();
    const double y = b.y_min + (b.y_max - b.y_min) * rng.uniform();
    out.emplace_back(x, y);
  }
  return out;
}

}  // namespace irsbeam
