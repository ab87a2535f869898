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
#include <initializer_list>
#include <random>

#include "irsbeam/common.hpp"

namespace irsbeam {

// Deterministic random stream. std::mt19937_64 output is fixed by the
// standard, and all transformations below (53-bit uniform, Box-Muller) are
// spelled out explicitly, so a given seed produces the same draws on every
// platform. Library distributions such as std::normal_distribution are
// deliberately avoided: their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; draws are consumed in pairs and the
  // second value is cached so one call costs one or zero engine pairs.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  // Circularly-symmetric complex normal CN(0, 1): each part has variance 1/2.
  cxd cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return cxd(re * 0.70710678118654752440, im * 0.70710678118654752440);
  }

  // Derives an independent child seed from a base seed and an index path
  // (splitmix64 chain). Used to give every realization/design/stage its own
  // stream so results do not depend on scheduling or evaluation order.
  static std::uint64_t derive(std::uint64_t base,
                              std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix(base ^ 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t p : path) h = splitmix(h ^ splitmix(p));
    return h;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace irsbeam
