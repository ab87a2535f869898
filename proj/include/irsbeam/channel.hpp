// SPDX-License-Identifier: Apache-2.0
//
// irsbeam: joint active/passive beamforming simulator for IRS-assisted radar
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsbeam/common.hpp"
#include "irsbeam/rng.hpp"
#include "irsbeam/scenario.hpp"

namespace irsbeam {

// Unit-norm steering vector of an n-element half-wavelength ULA:
// v[m] = exp(j*pi*m*sin(angle)) / sqrt(n).
inline VecXc ula_steering(double angle, int n) {
  if (n < 1) throw invalid_input("ula_steering: n must be >= 1");
  VecXc v(n);
  const double s = std::sin(angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m) {
    const double phase = kPi * static_cast<double>(m) * s;
    v(m) = cxd(std::cos(phase) * scale, std::sin(phase) * scale);
  }
  return v;
}

// Deterministic part of the distance-dependent loss in dB.
inline double pathloss_db(double distance, double a, double b) {
  if (!(distance > 0.0)) throw invalid_input("pathloss_db: distance must be > 0");
  return a + 10.0 * b * std::log10(distance);
}

// Draws one complex path gain: lognormal shadowing xi ~ N(0, sigma^2) on top
// of the deterministic loss, then a CN(0, 10^(-rho/10)) fading coefficient.
// Draw order (xi, then re/im of the fading term) is part of the contract.
inline cxd sample_path_gain(double distance, double a, double b,
                            double sigma_db, Rng& rng) {
  const double xi = sigma_db > 0.0 ? sigma_db * rng.gaussian() : 0.0;
  const double rho_db = pathloss_db(distance, a, b) + xi;
  const double amp = std::pow(10.0, -rho_db / 20.0);
  return amp * rng.cgaussian();
}

// Angle of `to` as seen from `from`, measured counter-clockwise from the
// positive x axis; the single azimuth convention used everywhere.
inline double azimuth(const Vec2& from, const Vec2& to) {
  return std::atan2(to.y() - from.y(), to.x() - from.x());
}

namespace detail {

// Smallest absolute angular separation, wrap-aware.
inline double angle_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return d > kPi ? 2.0 * kPi - d : d;
}

// Shared core of the blockage rule: among objects seen from `origin`, any
// object angularly closer than half the 3dB beamwidth of an n-element array
// (1.772/n rad) to a strictly nearer object is shadowed by it.
inline std::vector<int> blockage_from(const Vec2& origin,
                                      const std::vector<Vec2>& objects, int n,
                                      const char* what) {
  const std::size_t count = objects.size();
  std::vector<double> az(count), dist(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec2 d = objects[i] - origin;
    dist[i] = d.norm();
    if (!(dist[i] > 0.0))
      throw invalid_input(std::string(what) +
                          ": object coincides with the array origin");
    az[i] = std::atan2(d.y(), d.x());
  }
  const double half_bw = 0.5 * 1.772 / static_cast<double>(n);
  std::vector<int> gamma(count, 1);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j)
      if (i != j && dist[i] < dist[j] &&
          angle_distance(az[i], az[j]) < half_bw)
        gamma[j] = 0;
  return gamma;
}

}  // namespace detail

// Line-of-sight flags for the direct (TX-origin) paths: one flag per target
// followed by one per clutter object, 1 = visible, 0 = shadowed. Targets and
// clutter block each other symmetrically; only distance and azimuth matter.
inline std::vector<int> blockage_mask(const Scenario& s,
                                      const std::vector<Vec2>& targets) {
  std::vector<Vec2> objects = targets;
  objects.insert(objects.end(), s.clutter_positions.begin(),
                 s.clutter_positions.end());
  return detail::blockage_from(s.tx_position, objects, s.M, "blockage_mask");
}

struct ChannelOptions {
  // Extends the angular shadowing rule to IRS-origin paths (using the
  // reflecting array's own beamwidth). Off by default: reflected paths are
  // the mechanism that sees around obstructions.
  bool block_irs_paths = false;
};

// One realization of every channel in the scene.
struct ChannelSet {
  int M = 0, N = 0, K = 0, L = 0, Q = 0;
  std::vector<Vec2> target_positions;
  std::vector<VecXc> h_t;               // [L] direct TX->target, length M
  std::vector<VecXc> g_t;               // [Q] direct TX->clutter, length M
  std::vector<std::vector<VecXc>> h_i;  // [K][L] IRS->target, length N
  std::vector<std::vector<VecXc>> g_i;  // [K][Q] IRS->clutter, length N
  std::vector<MatXc> D;                 // [K] TX->IRS, N x M, rank one
  std::vector<int> gamma;               // [L+Q] direct-path visibility flags
};

// Draws every channel for one scene realization. Child rng streams are
// derived per object group so the draw consumed by any one channel does not
// depend on how many other objects exist; two scenarios sharing geometry up
// front therefore share those draws when given identical parent streams.
inline ChannelSet realize_channels(const Scenario& s,
                                   const std::vector<Vec2>& targets, Rng& rng,
                                   const ChannelOptions& opts = {}) {
  if (static_cast<int>(targets.size()) != s.L)
    throw invalid_input("realize_channels: targets.size() must equal L");
  const int M = s.M, N = s.N;
  const int K = s.num_irs(), L = s.L, Q = s.num_clutter();

  ChannelSet ch;
  ch.M = M;
  ch.N = N;
  ch.K = K;
  ch.L = L;
  ch.Q = Q;
  ch.target_positions = targets;
  ch.gamma = blockage_mask(s, targets);

  const std::uint64_t base = rng.next_u64();
  const double sqrtM = std::sqrt(static_cast<double>(M));
  const double sqrtN = std::sqrt(static_cast<double>(N));

  // Direct TX->target paths.
  ch.h_t.resize(L);
  for (int l = 0; l < L; ++l) {
    Rng sub(Rng::derive(base, {1, static_cast<std::uint64_t>(l)}));
    const double d = (targets[l] - s.tx_position).norm();
    const cxd alpha = sample_path_gain(d, s.pathloss_a, s.pathloss_b,
                                       s.pathloss_sigma_db, sub);
    ch.h_t[l] = sqrtM * alpha * static_cast<double>(ch.gamma[l]) *
                ula_steering(azimuth(s.tx_position, targets[l]), M);
  }

  // Direct TX->clutter paths.
  ch.g_t.resize(Q);
  for (int q = 0; q < Q; ++q) {
    Rng sub(Rng::derive(base, {2, static_cast<std::uint64_t>(q)}));
    const Vec2& c = s.clutter_positions[q];
    const double d = (c - s.tx_position).norm();
    const cxd alpha = sample_path_gain(d, s.pathloss_a, s.pathloss_b,
                                       s.pathloss_sigma_db, sub);
    ch.g_t[q] = sqrtM * alpha * static_cast<double>(ch.gamma[L + q]) *
                ula_steering(azimuth(s.tx_position, c), M);
  }

  // Reflected paths, one surface at a time.
  ch.h_i.assign(K, {});
  ch.g_i.assign(K, {});
  ch.D.resize(K);
  for (int k = 0; k < K; ++k) {
    const Vec2& irs = s.irs_positions[k];

    std::vector<int> irs_gamma(L + Q, 1);
    if (opts.block_irs_paths) {
      std::vector<Vec2> objects = targets;
      objects.insert(objects.end(), s.clutter_positions.begin(),
                     s.clutter_positions.end());
      irs_gamma = detail::blockage_from(irs, objects, N, "realize_channels");
    }

    // TX->IRS rank-one link.
    {
      Rng sub(Rng::derive(base, {3, static_cast<std::uint64_t>(k)}));
      const double d = (irs - s.tx_position).norm();
      const cxd alpha_k = sample_path_gain(d, s.pathloss_a, s.pathloss_b,
                                           s.pathloss_sigma_db, sub);
      const VecXc d_t = ula_steering(azimuth(s.tx_position, irs), M);
      const VecXc d_r = ula_steering(azimuth(irs, s.tx_position), N);
      ch.D[k] = (sqrtM * sqrtN * alpha_k) * (d_r * d_t.adjoint());
    }

    ch.h_i[k].resize(L);
    for (int l = 0; l < L; ++l) {
      Rng sub(Rng::derive(
          base, {4, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l)}));
      const double d = (targets[l] - irs).norm();
      const cxd alpha = sample_path_gain(d, s.pathloss_a, s.pathloss_b,
                                         s.pathloss_sigma_db, sub);
      ch.h_i[k][l] = sqrtN * alpha * static_cast<double>(irs_gamma[l]) *
                     ula_steering(azimuth(irs, targets[l]), N);
    }

    ch.g_i[k].resize(Q);
    for (int q = 0; q < Q; ++q) {
      Rng sub(Rng::derive(
          base, {5, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(q)}));
      const Vec2& c = s.clutter_positions[q];
      const double d = (c - irs).norm();
      const cxd alpha = sample_path_gain(d, s.pathloss_a, s.pathloss_b,
                                         s.pathloss_sigma_db, sub);
      ch.g_i[k][q] = sqrtN * alpha * static_cast<double>(irs_gamma[L + q]) *
                     ula_steering(azimuth(irs, c), N);
    }
  }
  return ch;
}

namespace detail {

inline nlohmann::ordered_json cvec_to_json(const VecXc& v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

inline nlohmann::ordered_json cmat_to_json(const MatXc& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline VecXc cvec_from_json(const nlohmann::json& j) {
  VecXc v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        cxd(j[i][0].get<double>(), j[i][1].get<double>());
  return v;
}

inline MatXc cmat_from_json(const nlohmann::json& j) {
  const auto rows = j.size();
  const auto cols = rows ? j[0].size() : 0;
  MatXc m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          cxd(j[r][c][0].get<double>(), j[r][c][1].get<double>());
  return m;
}

}  // namespace detail

// Serializes one realization as a structured-text document: complex entries
// as [re, im] pairs, matrices row-major. Intended for cross-implementation
// regression checks.
inline std::string dump_channels(const ChannelSet& ch) {
  nlohmann::ordered_json j;
  j["M"] = ch.M;
  j["N"] = ch.N;
  j["K"] = ch.K;
  j["L"] = ch.L;
  j["Q"] = ch.Q;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : ch.target_positions) pts.push_back({p.x(), p.y()});
  j["target_positions"] = pts;
  j["gamma"] = ch.gamma;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& v : ch.h_t) arr.push_back(detail::cvec_to_json(v));
  j["h_t"] = arr;
  arr = nlohmann::ordered_json::array();
  for (const auto& v : ch.g_t) arr.push_back(detail::cvec_to_json(v));
  j["g_t"] = arr;
  arr = nlohmann::ordered_json::array();
  for (const auto& per_k : ch.h_i) {
    auto inner = nlohmann::ordered_json::array();
    for (const auto& v : per_k) inner.push_back(detail::cvec_to_json(v));
    arr.push_back(inner);
  }
  j["h_i"] = arr;
  arr = nlohmann::ordered_json::array();
  for (const auto& per_k : ch.g_i) {
    auto inner = nlohmann::ordered_json::array();
    for (const auto& v : per_k) inner.push_back(detail::cvec_to_json(v));
    arr.push_back(inner);
  }
  j["g_i"] = arr;
  arr = nlohmann::ordered_json::array();
  for (const auto& m : ch.D) arr.push_back(detail::cmat_to_json(m));
  j["D"] = arr;
  return j.dump(2) + "\n";
}

inline ChannelSet load_channels(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("load_channels: not valid JSON: ") + e.what());
  }
  ChannelSet ch;
  try {
    ch.M = j.at("M").get<int>();
    ch.N = j.at("N").get<int>();
    ch.K = j.at("K").get<int>();
    ch.L = j.at("L").get<int>();
    ch.Q = j.at("Q").get<int>();
    for (const auto& p : j.at("target_positions"))
      ch.target_positions.emplace_back(p[0].get<double>(), p[1].get<double>());
    ch.gamma = j.at("gamma").get<std::vector<int>>();
    for (const auto& v : j.at("h_t")) ch.h_t.push_back(detail::cvec_from_json(v));
    for (const auto& v : j.at("g_t")) ch.g_t.push_back(detail::cvec_from_json(v));
    for (const auto& per_k : j.at("h_i")) {
      std::vector<VecXc> inner;
      for (const auto& v : per_k) inner.push_back(detail::cvec_from_json(v));
      ch.h_i.push_back(std::move(inner));
    }
    for (const auto& per_k : j.at("g_i")) {
      std::vector<VecXc> inner;
      for (const auto& v : per_k) inner.push_back(detail::cvec_from_json(v));
      ch.g_i.push_back(std::move(inner));
    }
    for (const auto& m : j.at("D")) ch.D.push_back(detail::cmat_from_json(m));
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("load_channels: malformed document: ") +
                        e.what());
  }
  return ch;
}

// Order-stable FNV-1a hash over every stored byte; used to confirm that
// paired designs really consumed identical channel draws.
inline std::uint64_t channel_hash(const ChannelSet& ch) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix_bytes = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  auto mix_double = [&](double d) { mix_bytes(&d, sizeof(d)); };
  auto mix_cvec = [&](const VecXc& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      mix_double(v(i).real());
      mix_double(v(i).imag());
    }
  };
  mix_bytes(&ch.M, sizeof(ch.M));
  mix_bytes(&ch.N, sizeof(ch.N));
  mix_bytes(&ch.K, sizeof(ch.K));
  mix_bytes(&ch.L, sizeof(ch.L));
  mix_bytes(&ch.Q, sizeof(ch.Q));
  for (const auto& p : ch.target_positions) {
    mix_double(p.x());
    mix_double(p.y());
  }
  for (int g : ch.gamma) mix_bytes(&g, sizeof(g));
  for (const auto& v : ch.h_t) mix_cvec(v);
  for (const auto& v : ch.g_t) mix_cvec(v);
  for (const auto& per_k : ch.h_i)
    for (const auto& v : per_k) mix_cvec(v);
  for (const auto& per_k : ch.g_i)
    for (const auto& v : per_k) mix_cvec(v);
  for (const auto& m : ch.D)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        mix_double(m(r, c).real());
        mix_double(m(r, c).imag());
      }
  return h;
}

}  // namespace irsbeam
