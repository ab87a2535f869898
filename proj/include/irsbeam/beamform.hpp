// SPDX-License-Identifier: Apache-2.0
//
// irsbeam: joint active/passive beamforming simulator for IRS-assisted radar
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Joint active (transmit weights) and passive (reflecting-surface phases)
// beamforming by alternating semidefinite relaxation.
//
// Active step: with the phases fixed, the max-min illumination problem in t
// is a QCQP; lifting T = t t^H relaxes it to a trace-bounded SDP over
// rank-one data A_l = a_l a_l^H, and Gaussian randomization with a max-ratio
// scaling recovers a feasible beamformer.
//
// Passive step: with t fixed, each surface contributes theta_k^H (h_i ∘ D t)
// to the scalar at an object, so the problem in the stacked phase vector is a
// non-homogeneous QCQP; homogenizing with one auxiliary unit-modulus slot
// yields (NK+1)-dimensional blocks H_l, G_q and a unit-diagonal SDP, rounded
// by Gaussian randomization plus elementwise phase projection.
//
// The alternation accepts an update only when it strictly improves the best
// minimum target power, so the power trajectory is non-decreasing by
// construction and the relative-improvement stop rule is well defined.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irsbeam/channel.hpp"
#include "irsbeam/common.hpp"
#include "irsbeam/rng.hpp"
#include "irsbeam/scenario.hpp"
#include "irsbeam/sdp.hpp"

namespace irsbeam {

// Transmit beamformer; entries carry watts^(1/2).
struct Beamformer {
  VecXc t;
  double power() const { return t.squaredNorm(); }
};

// Unit-modulus reflection coefficients for all K surfaces, stored as phase
// angles so the modulus-one invariant holds by representation: the complex
// view is exp(j*phase) entry by entry.
class PhaseProfile {
 public:
  PhaseProfile() = default;
  PhaseProfile(int per_irs, int num_irs, VecX phases)
      : n_(per_irs), k_(num_irs), phases_(std::move(phases)) {
    if (n_ < 1 || k_ < 1 || phases_.size() != static_cast<Eigen::Index>(n_) * k_)
      throw invalid_input("PhaseProfile: phases length must equal N*K");
    if (!phases_.allFinite())
      throw invalid_input("PhaseProfile: phases must be finite");
  }

  static PhaseProfile identity(int per_irs, int num_irs) {
    return PhaseProfile(per_irs, num_irs,
                        VecX::Zero(static_cast<Eigen::Index>(per_irs) * num_irs));
  }

  int per_irs() const { return n_; }
  int num_irs() const { return k_; }
  int entries() const { return n_ * k_; }
  const VecX& phases() const { return phases_; }

  VecXc complex() const {
    VecXc v(phases_.size());
    for (Eigen::Index i = 0; i < phases_.size(); ++i)
      v(i) = std::polar(1.0, phases_(i));
    return v;
  }

  // Reflection coefficients of surface k (the diagonal of its phase matrix).
  VecXc surface(int k) const {
    if (k < 0 || k >= k_) throw invalid_input("PhaseProfile: surface index");
    VecXc v(n_);
    for (int i = 0; i < n_; ++i)
      v(i) = std::polar(1.0, phases_(static_cast<Eigen::Index>(k) * n_ + i));
    return v;
  }

 private:
  int n_ = 0, k_ = 0;
  VecX phases_;
};

enum class DesignStatus { converged, max_iterations, infeasible };

inline const char* to_string(DesignStatus s) {
  switch (s) {
    case DesignStatus::converged: return "converged";
    case DesignStatus::max_iterations: return "max_iterations";
    default: return "infeasible";
  }
}

struct DesignResult {
  DesignStatus status = DesignStatus::infeasible;
  Beamformer beamformer;
  PhaseProfile phases;
  std::vector<double> min_power_trajectory;  // best-so-far watts per round
  int iterations = 0;
  VecX per_target_power;   // L entries, watts
  VecX per_clutter_power;  // Q entries, watts
  int passive_steps_skipped = 0;

  double min_power() const {
    return per_target_power.size() ? per_target_power.minCoeff() : 0.0;
  }
};

enum class ObjectKind { target, clutter };

namespace detail {

inline void check_consistent(const ChannelSet& ch, int eta_count) {
  if (ch.M < 1 || ch.N < 1 || ch.K < 1 || ch.L < 1)
    throw invalid_input("beamform: channel set has empty dimensions");
  if (static_cast<int>(ch.h_t.size()) != ch.L ||
      static_cast<int>(ch.g_t.size()) != ch.Q ||
      static_cast<int>(ch.h_i.size()) != ch.K ||
      static_cast<int>(ch.g_i.size()) != ch.K ||
      static_cast<int>(ch.D.size()) != ch.K)
    throw invalid_input("beamform: channel set arrays disagree with K/L/Q");
  if (eta_count != ch.Q)
    throw invalid_input("beamform: eta length must equal the clutter count");
}

// Rotates a vector so its first entry has nonnegative real part and zero
// imaginary part; illumination powers are invariant to this global phase.
inline void canonicalize_phase(VecXc& v) {
  if (v.size() == 0) return;
  const double mag = std::abs(v(0));
  if (mag > 0.0) v *= std::conj(v(0)) / mag;
}

}  // namespace detail

// Conjugated effective transmit-side channel of one object: the illumination
// amplitude at the object is a^H t, with
//   a^H = v_t^T + sum_k (v_{i,k} ∘ conj(theta_k))^T D_k.
inline VecXc effective_channel(const ChannelSet& ch, const PhaseProfile& theta,
                               ObjectKind kind, int index) {
  const int count = kind == ObjectKind::target ? ch.L : ch.Q;
  if (index < 0 || index >= count)
    throw invalid_input("effective_channel: object index out of range");
  if (theta.per_irs() != ch.N || theta.num_irs() != ch.K)
    throw invalid_input("effective_channel: phase profile shape mismatch");

  const VecXc& vt =
      kind == ObjectKind::target ? ch.h_t[index] : ch.g_t[index];
  VecXc a = vt.conjugate();
  for (int k = 0; k < ch.K; ++k) {
    const VecXc& vi =
        kind == ObjectKind::target ? ch.h_i[k][index] : ch.g_i[k][index];
    const VecXc seg = theta.surface(k);
    a.noalias() +=
        ch.D[k].adjoint() * vi.conjugate().cwiseProduct(seg);
  }
  return a;
}

// |(v_t^T + sum_k v_{i,k}^T Theta_k^H D_k) t|^2 for one target or clutter
// object, in watts.
inline double illumination_power(const ChannelSet& ch, const Beamformer& bf,
                                 const PhaseProfile& theta, ObjectKind kind,
                                 int index) {
  if (bf.t.size() != ch.M)
    throw invalid_input("illumination_power: beamformer length mismatch");
  return std::norm(effective_channel(ch, theta, kind, index).dot(bf.t));
}

// Trace-bounded relaxation of the active step: objective rows a_l a_l^H,
// power budget tr(T) <= kappa, clutter rows b_q b_q^H <= eta_q.
inline SdpProblem build_active_sdp(const ChannelSet& ch,
                                   const PhaseProfile& theta, double kappa,
                                   const VecX& eta) {
  detail::check_consistent(ch, static_cast<int>(eta.size()));
  SdpProblem prob;
  prob.n = ch.M;
  prob.trace_bound = kappa;
  for (int l = 0; l < ch.L; ++l) {
    const VecXc a = effective_channel(ch, theta, ObjectKind::target, l);
    prob.objective_terms.emplace_back(a * a.adjoint(), 0.0);
  }
  for (int q = 0; q < ch.Q; ++q) {
    const VecXc b = effective_channel(ch, theta, ObjectKind::clutter, q);
    prob.inequality_terms.emplace_back(b * b.adjoint(), eta(q));
  }
  return prob;
}

namespace detail {

// Shared rounding core over precomputed effective channels: draw candidates
// from the lifted solution, rescale each onto the feasible set by the
// largest constraint ratio, keep the best worst-target power (first index on
// ties).
inline Beamformer round_active(const MatXc& T, const std::vector<VecXc>& a,
                               const std::vector<VecXc>& b, double kappa,
                               const VecX& eta, int trials, Rng& rng) {
  if (trials < 1) throw invalid_input("randomize_active: trials must be >= 1");
  if (kappa <= 0.0) throw invalid_input("randomize_active: kappa must be > 0");
  const int m = static_cast<int>(T.rows());
  const MatXc samples = sample_gaussian(T, trials, rng);

  VecXc best = VecXc::Zero(m);
  double best_obj = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < trials; ++i) {
    VecXc xi = samples.col(i);
    double ratio = xi.squaredNorm() / kappa;
    for (std::size_t q = 0; q < b.size(); ++q)
      ratio = std::max(ratio, std::norm(b[q].dot(xi)) / eta(q));
    if (ratio > 0.0) xi /= std::sqrt(ratio);

    double obj = std::numeric_limits<double>::infinity();
    for (const auto& al : a) obj = std::min(obj, std::norm(al.dot(xi)));
    if (obj > best_obj) {
      best_obj = obj;
      best = xi;
    }
  }
  return Beamformer{std::move(best)};
}

}  // namespace detail

// Feasible rank-one recovery for the active step (max-ratio rescaling of
// Gaussian candidates drawn with the SDP maximizer as covariance). T should
// come from a status=optimal solve.
inline Beamformer randomize_active(const MatXc& T, const ChannelSet& ch,
                                   const PhaseProfile& theta, double kappa,
                                   const VecX& eta, int trials, Rng& rng) {
  detail::check_consistent(ch, static_cast<int>(eta.size()));
  if (T.rows() != ch.M || T.cols() != ch.M)
    throw invalid_input("randomize_active: T must be M x M");
  std::vector<VecXc> a, b;
  for (int l = 0; l < ch.L; ++l)
    a.push_back(effective_channel(ch, theta, ObjectKind::target, l));
  for (int q = 0; q < ch.Q; ++q)
    b.push_back(effective_channel(ch, theta, ObjectKind::clutter, q));
  return detail::round_active(T, a, b, kappa, eta, trials, rng);
}

// Passive-step problem data: the homogenized unit-diagonal SDP plus the
// stacked per-object vectors needed for rounding and re-checks.
struct PassiveProblem {
  SdpProblem sdp;          // n = N*K + 1, unit_diagonal
  std::vector<VecXc> h;    // [L] stacked h_{i,k,l} ∘ (D_k t)
  std::vector<VecXc> g;    // [Q]
  VecXc a;                 // [L] direct-path scalars h_t^T t
  VecXc b;                 // [Q] direct-path scalars g_t^T t
  VecX eta;
  // Clutter objects whose direct path alone already violates its cap
  // (|b_q|^2 > eta_q): no phase choice can fix these, so the SDP is
  // structurally infeasible and callers must not round it.
  std::vector<int> direct_violations;
  int N = 0, K = 0;
};

inline PassiveProblem build_passive_sdp(const ChannelSet& ch,
                                        const Beamformer& bf,
                                        const VecX& eta) {
  detail::check_consistent(ch, static_cast<int>(eta.size()));
  if (bf.t.size() != ch.M)
    throw invalid_input("build_passive_sdp: beamformer length mismatch");
  const int nk = ch.N * ch.K;

  PassiveProblem pp;
  pp.N = ch.N;
  pp.K = ch.K;
  pp.eta = eta;
  pp.a.resize(ch.L);
  pp.b.resize(ch.Q);

  std::vector<VecXc> dt(ch.K);
  for (int k = 0; k < ch.K; ++k) dt[k] = ch.D[k] * bf.t;

  auto stack = [&](const std::vector<std::vector<VecXc>>& vi, int idx) {
    VecXc s(nk);
    for (int k = 0; k < ch.K; ++k)
      s.segment(static_cast<Eigen::Index>(k) * ch.N, ch.N) =
          vi[k][idx].cwiseProduct(dt[k]);
    return s;
  };
  auto homogenize = [&](const VecXc& v, cxd scalar) {
    MatXc m = MatXc::Zero(nk + 1, nk + 1);
    m.topLeftCorner(nk, nk) = v * v.adjoint();
    m.topRightCorner(nk, 1) = v * std::conj(scalar);
    m.bottomLeftCorner(1, nk) = scalar * v.adjoint();
    return m;
  };

  pp.sdp.n = nk + 1;
  pp.sdp.unit_diagonal = true;
  for (int l = 0; l < ch.L; ++l) {
    pp.h.push_back(stack(ch.h_i, l));
    pp.a(l) = (ch.h_t[l].array() * bf.t.array()).sum();
    pp.sdp.objective_terms.emplace_back(homogenize(pp.h[l], pp.a(l)),
                                        std::norm(pp.a(l)));
  }
  for (int q = 0; q < ch.Q; ++q) {
    pp.g.push_back(stack(ch.g_i, q));
    pp.b(q) = (ch.g_t[q].array() * bf.t.array()).sum();
    pp.sdp.inequality_terms.emplace_back(homogenize(pp.g[q], pp.b(q)),
                                         eta(q) - std::norm(pp.b(q)));
    if (std::norm(pp.b(q)) > eta(q)) pp.direct_violations.push_back(q);
  }
  return pp;
}

// Thrown when every randomization candidate violates a clutter cap after the
// unit-modulus projection; carries the smallest violation seen.
class rounding_infeasible : public std::runtime_error {
 public:
  explicit rounding_infeasible(double violation_watts)
      : std::runtime_error(
            "randomize_passive: no candidate satisfied the clutter bounds "
            "(best violation " +
            std::to_string(violation_watts) + " W)"),
        best_violation(violation_watts) {}
  double best_violation;
};

// Rank-one recovery for the passive step: Gaussian candidates from the
// lifted solution, projected elementwise onto unit modulus relative to the
// homogenization slot. The pre-projection clutter rescaling is a positive
// scalar and cannot change any entry's argument, so it never alters the
// projected candidate; feasibility is instead enforced by re-checking each
// projected candidate against the caps and discarding violators.
inline PhaseProfile randomize_passive(const PassiveProblem& pp,
                                      const MatXc& theta_sol, int trials,
                                      Rng& rng) {
  if (trials < 1)
    throw invalid_input("randomize_passive: trials must be >= 1");
  if (!pp.direct_violations.empty())
    throw invalid_input(
        "randomize_passive: direct clutter power already violates its cap");
  const int nk = pp.N * pp.K;
  if (theta_sol.rows() != nk + 1 || theta_sol.cols() != nk + 1)
    throw invalid_input("randomize_passive: solution must be (NK+1)^2");

  const MatXc samples = sample_gaussian(theta_sol, trials, rng);

  VecX best_phases;
  double best_obj = -std::numeric_limits<double>::infinity();
  double best_violation = std::numeric_limits<double>::infinity();
  VecX phases(nk);
  VecXc u(nk);
  for (int i = 0; i < trials; ++i) {
    const auto xi = samples.col(i);
    const cxd w = xi(nk);
    for (int n = 0; n < nk; ++n) {
      const cxd rel = w != cxd(0.0, 0.0) ? cxd(xi(n) * std::conj(w)) : xi(n);
      phases(n) = std::atan2(rel.imag(), rel.real());
      u(n) = std::polar(1.0, phases(n));
    }

    double violation = 0.0;
    for (std::size_t q = 0; q < pp.g.size(); ++q) {
      const double pw = std::norm(pp.b(q) + u.dot(pp.g[q]));
      violation = std::max(
          violation, pw - pp.eta(q) - 1e-12 * (1.0 + pp.eta(q)));
    }
    if (violation > 0.0) {
      best_violation = std::min(best_violation, violation);
      continue;
    }
    double obj = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < pp.h.size(); ++l)
      obj = std::min(obj, std::norm(pp.a(l) + u.dot(pp.h[l])));
    if (obj > best_obj) {
      best_obj = obj;
      best_phases = phases;
    }
  }
  if (best_phases.size() == 0) throw rounding_infeasible(best_violation);
  return PhaseProfile(pp.N, pp.K, std::move(best_phases));
}

struct JointOptions {
  // Identity (all-zero phases) initialization is the deterministic default;
  // uniform-random phases are available for sensitivity studies.
  bool random_phase_init = false;
};

namespace detail {

inline double min_target_power(const ChannelSet& ch, const Beamformer& bf,
                               const PhaseProfile& theta) {
  double p = std::numeric_limits<double>::infinity();
  for (int l = 0; l < ch.L; ++l)
    p = std::min(p, illumination_power(ch, bf, theta, ObjectKind::target, l));
  return p;
}

inline VecX eta_vector(const Scenario& s) {
  return Eigen::Map<const VecX>(s.eta_watts.data(),
                                static_cast<Eigen::Index>(s.eta_watts.size()));
}

inline void check_scenario_channels(const ChannelSet& ch, const Scenario& s) {
  validate(s);
  if (ch.M != s.M || ch.N != s.N || ch.K != s.num_irs() || ch.L != s.L ||
      ch.Q != s.num_clutter())
    throw invalid_input("design: channel set does not match the scenario");
}

inline DesignResult finish(const ChannelSet& ch, DesignStatus status,
                           Beamformer bf, PhaseProfile theta,
                           std::vector<double> traj, int iterations,
                           int skipped) {
  DesignResult r;
  r.status = status;
  detail::canonicalize_phase(bf.t);
  r.per_target_power.resize(ch.L);
  r.per_clutter_power.resize(ch.Q);
  for (int l = 0; l < ch.L; ++l)
    r.per_target_power(l) =
        illumination_power(ch, bf, theta, ObjectKind::target, l);
  for (int q = 0; q < ch.Q; ++q)
    r.per_clutter_power(q) =
        illumination_power(ch, bf, theta, ObjectKind::clutter, q);
  r.beamformer = std::move(bf);
  r.phases = std::move(theta);
  r.min_power_trajectory = std::move(traj);
  r.iterations = iterations;
  r.passive_steps_skipped = skipped;
  return r;
}

inline DesignResult zero_result(const ChannelSet& ch, DesignStatus status) {
  return finish(ch, status, Beamformer{VecXc::Zero(ch.M)},
                PhaseProfile::identity(ch.N, ch.K), {0.0}, 1, 0);
}

}  // namespace detail

// Alternating relaxation: active step and passive step in turn, each update
// accepted only if it strictly improves the best minimum target power, until
// the per-round relative improvement drops below epsilon or the round budget
// is exhausted. A failed passive step (structurally infeasible cap, solver
// failure, or no feasible rounding candidate) skips that update and is
// counted; the incumbent pair stays feasible throughout. A subproblem whose
// inputs did not change since its last solve is not re-solved: re-rounding
// the identical relaxation is pure Monte Carlo churn, and skipping it makes
// the stop rule fire deterministically once neither step can progress.
inline DesignResult joint_design(const ChannelSet& ch, const Scenario& s,
                                 Rng& rng, const JointOptions& opts = {}) {
  detail::check_scenario_channels(ch, s);
  const VecX eta = detail::eta_vector(s);

  PhaseProfile theta = PhaseProfile::identity(ch.N, ch.K);
  if (opts.random_phase_init) {
    VecX ph(static_cast<Eigen::Index>(ch.N) * ch.K);
    for (Eigen::Index i = 0; i < ph.size(); ++i)
      ph(i) = rng.uniform(0.0, 2.0 * kPi);
    theta = PhaseProfile(ch.N, ch.K, std::move(ph));
  }
  Beamformer best_t{VecXc::Zero(ch.M)};
  double best = 0.0, prev = 0.0;
  bool theta_stale = true;  // active subproblem inputs changed
  bool t_stale = true;      // passive subproblem inputs changed
  int skipped = 0;
  int iterations = 0;
  DesignStatus status = DesignStatus::max_iterations;
  std::vector<double> traj;
  traj.reserve(s.max_iterations);

  for (int j = 1; j <= s.max_iterations; ++j) {
    if (theta_stale) {
      theta_stale = false;
      const SdpSolution sol =
          solve_maxmin_sdp(build_active_sdp(ch, theta, s.kappa_watts, eta));
      if (sol.status == SdpStatus::optimal) {
        Beamformer cand = randomize_active(sol.X, ch, theta, s.kappa_watts,
                                           eta, s.trials_I, rng);
        const double p = detail::min_target_power(ch, cand, theta);
        if (p > best) {
          best = p;
          best_t = std::move(cand);
          t_stale = true;
        }
      }
    }
    if (t_stale) {
      t_stale = false;
      const PassiveProblem pp = build_passive_sdp(ch, best_t, eta);
      if (!pp.direct_violations.empty()) {
        ++skipped;
      } else {
        const SdpSolution sol = solve_maxmin_sdp(pp.sdp);
        if (sol.status != SdpStatus::optimal) {
          ++skipped;
        } else {
          try {
            PhaseProfile cand = randomize_passive(pp, sol.X, s.trials_I, rng);
            const double p = detail::min_target_power(ch, best_t, cand);
            if (p > best) {
              best = p;
              theta = std::move(cand);
              theta_stale = true;
            }
          } catch (const rounding_infeasible&) {
            ++skipped;
          }
        }
      }
    }
    traj.push_back(best);
    iterations = j;
    if (j >= 2 && best - prev <= s.epsilon * std::max(prev, 1e-300)) {
      status = DesignStatus::converged;
      break;
    }
    prev = best;
  }
  return detail::finish(ch, status, std::move(best_t), std::move(theta),
                        std::move(traj), iterations, skipped);
}

namespace detail {

// One-shot active design over precomputed effective channels (shared by the
// fixed-identity-phases and the no-surface baselines).
inline DesignResult single_active_design(const ChannelSet& ch,
                                         const Scenario& s, Rng& rng,
                                         const std::vector<VecXc>& a,
                                         const std::vector<VecXc>& b,
                                         PhaseProfile theta) {
  const VecX eta = eta_vector(s);
  SdpProblem prob;
  prob.n = ch.M;
  prob.trace_bound = s.kappa_watts;
  for (const auto& al : a) prob.objective_terms.emplace_back(al * al.adjoint(), 0.0);
  for (int q = 0; q < ch.Q; ++q)
    prob.inequality_terms.emplace_back(b[q] * b[q].adjoint(), eta(q));

  const SdpSolution sol = solve_maxmin_sdp(prob);
  if (sol.status != SdpStatus::optimal)
    return zero_result(ch, DesignStatus::max_iterations);

  Beamformer bf =
      round_active(sol.X, a, b, s.kappa_watts, eta, s.trials_I, rng);
  double p = std::numeric_limits<double>::infinity();
  for (const auto& al : a) p = std::min(p, std::norm(al.dot(bf.t)));

  DesignResult r;
  r.status = DesignStatus::converged;
  canonicalize_phase(bf.t);
  r.per_target_power.resize(ch.L);
  r.per_clutter_power.resize(ch.Q);
  for (int l = 0; l < ch.L; ++l) r.per_target_power(l) = std::norm(a[l].dot(bf.t));
  for (int q = 0; q < ch.Q; ++q)
    r.per_clutter_power(q) = std::norm(b[q].dot(bf.t));
  r.beamformer = std::move(bf);
  r.phases = std::move(theta);
  r.min_power_trajectory = {p};
  r.iterations = 1;
  return r;
}

}  // namespace detail

// Active beamforming only: one active step with every surface fixed to the
// identity phase matrix.
inline DesignResult active_only_design(const ChannelSet& ch, const Scenario& s,
                                       Rng& rng) {
  detail::check_scenario_channels(ch, s);
  PhaseProfile theta = PhaseProfile::identity(ch.N, ch.K);
  std::vector<VecXc> a, b;
  for (int l = 0; l < ch.L; ++l)
    a.push_back(effective_channel(ch, theta, ObjectKind::target, l));
  for (int q = 0; q < ch.Q; ++q)
    b.push_back(effective_channel(ch, theta, ObjectKind::clutter, q));
  return detail::single_active_design(ch, s, rng, a, b, std::move(theta));
}

// Conventional baseline: no surfaces at all. Effective channels reduce to
// the conjugated direct paths, and the result never depends on any
// surface-related channel entry.
inline DesignResult no_irs_design(const ChannelSet& ch, const Scenario& s,
                                  Rng& rng) {
  detail::check_scenario_channels(ch, s);
  std::vector<VecXc> a, b;
  for (int l = 0; l < ch.L; ++l) a.push_back(ch.h_t[l].conjugate());
  for (int q = 0; q < ch.Q; ++q) b.push_back(ch.g_t[q].conjugate());
  return detail::single_active_design(ch, s, rng, a, b,
                                      PhaseProfile::identity(ch.N, ch.K));
}

// Passive beamforming only: the transmitter points its full power budget at
// the first surface (maximizing the power into that surface's rank-one
// feed), then one passive step optimizes the phases.
inline DesignResult passive_only_design(const ChannelSet& ch,
                                        const Scenario& s, Rng& rng) {
  detail::check_scenario_channels(ch, s);
  const VecX eta = detail::eta_vector(s);
  // D_k = c * d_r d_t^H, so the power fed into surface 1 is |d_t^H t|^2 and
  // the Cauchy-Schwarz maximizer over the power ball is sqrt(kappa) * d_t.
  const Beamformer bf{std::sqrt(s.kappa_watts) *
                      ula_steering(azimuth(s.tx_position, s.irs_positions[0]),
                                   s.M)};

  const PassiveProblem pp = build_passive_sdp(ch, bf, eta);
  if (!pp.direct_violations.empty())
    return detail::zero_result(ch, DesignStatus::infeasible);
  const SdpSolution sol = solve_maxmin_sdp(pp.sdp);
  if (sol.status == SdpStatus::infeasible)
    return detail::zero_result(ch, DesignStatus::infeasible);
  if (sol.status != SdpStatus::optimal)
    return detail::zero_result(ch, DesignStatus::max_iterations);
  try {
    PhaseProfile theta = randomize_passive(pp, sol.X, s.trials_I, rng);
    const double p = detail::min_target_power(ch, bf, theta);
    return detail::finish(ch, DesignStatus::converged, bf, std::move(theta),
                          {p}, 1, 0);
  } catch (const rounding_infeasible&) {
    return detail::zero_result(ch, DesignStatus::infeasible);
  }
}

}  // namespace irsbeam
