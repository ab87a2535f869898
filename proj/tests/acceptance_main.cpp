// SPDX-License-Identifier: Apache-2.0
//
// irsbeam: joint active/passive beamforming simulator for IRS-assisted radar
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

// End-to-end acceptance suite: eight numbered checks covering solver
// correctness against closed-form oracles, lifted-problem identities,
// grid-search near-optimality, feasibility closure, convergence behavior,
// design ordering, sweep trends, and bitwise determinism. Prints one
// PASS/FAIL line per check and exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "irsbeam/harness.hpp"

using namespace irsbeam;

namespace {

int failures = 0;

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

void report(int idx, bool pass, const std::string& detail) {
  std::printf("%s %d: %s\n", pass ? "PASS" : "FAIL", idx, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// --- synthetic problem builders (mirrors the unit-test generators) ----------

ChannelSet empty_channels(int M, int N, int K, int L, int Q) {
  ChannelSet ch;
  ch.M = M;
  ch.N = N;
  ch.K = K;
  ch.L = L;
  ch.Q = Q;
  ch.h_t.assign(L, VecXc::Zero(M));
  ch.g_t.assign(Q, VecXc::Zero(M));
  ch.h_i.assign(K, std::vector<VecXc>(L, VecXc::Zero(N)));
  ch.g_i.assign(K, std::vector<VecXc>(Q, VecXc::Zero(N)));
  ch.D.assign(K, MatXc::Zero(N, M));
  ch.gamma.assign(L + Q, 1);
  ch.target_positions.assign(L, Vec2(0.0, 200.0));
  return ch;
}

VecXc random_vec(int n, Rng& rng) {
  VecXc v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.cgaussian();
  return v;
}

ChannelSet random_channels(int M, int N, int K, int L, int Q, Rng& rng) {
  ChannelSet ch = empty_channels(M, N, K, L, Q);
  for (int l = 0; l < L; ++l) ch.h_t[l] = random_vec(M, rng);
  for (int q = 0; q < Q; ++q) ch.g_t[q] = random_vec(M, rng);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) ch.h_i[k][l] = random_vec(N, rng);
    for (int q = 0; q < Q; ++q) ch.g_i[k][q] = random_vec(N, rng);
    ch.D[k] = random_vec(N, rng) * random_vec(M, rng).adjoint();
  }
  return ch;
}

Scenario matching_scenario(int M, int N, int K, int L, int Q, double kappa) {
  Scenario s;
  s.M = M;
  s.N = N;
  s.L = L;
  s.irs_positions.clear();
  for (int k = 0; k < K; ++k) s.irs_positions.emplace_back(-130.0 + 40.0 * k, 75.0);
  s.clutter_positions.clear();
  s.eta_watts.clear();
  for (int q = 0; q < Q; ++q) {
    s.clutter_positions.emplace_back(-75.0 + 30.0 * q, 125.0);
    s.eta_watts.push_back(0.5e-6);
  }
  s.kappa_watts = kappa;
  return s;
}

PhaseProfile random_profile(int N, int K, Rng& rng) {
  VecX ph(N * K);
  for (int i = 0; i < N * K; ++i) ph(i) = rng.uniform(-3.14159, 3.14159);
  return PhaseProfile(N, K, ph);
}

// --- rank statistics ---------------------------------------------------------

std::vector<double> average_ranks(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (int t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = static_cast<int>(a.size());
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, da = 0.0, db = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da <= 0.0 || db <= 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

// --- criterion 1: solver vs eigensolver oracle -------------------------------

void criterion1() {
  Timer tm;
  Rng rng(101);
  double worst_rel = 0.0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const int M = 1 + i % 8;
    const int N = 1 + i % 3;
    const int K = 1 + i % 2;
    const ChannelSet ch = random_channels(M, N, K, 1, 0, rng);
    const PhaseProfile theta = random_profile(N, K, rng);
    const double kappa = rng.uniform(0.2, 3.0);
    const SdpProblem prob = build_active_sdp(ch, theta, kappa, VecX());
    const SdpSolution sol = solve_maxmin_sdp(prob);
    Eigen::SelfAdjointEigenSolver<MatXc> eig(prob.objective_terms[0].first);
    const double oracle = kappa * eig.eigenvalues().maxCoeff();
    const double rel = std::abs(sol.objective_value - oracle) /
                       std::max(std::abs(oracle), 1e-300);
    worst_rel = std::max(worst_rel, rel);
    if (sol.status != SdpStatus::optimal || rel > 1e-6) ++bad;
  }
  const double t = tm.sec();
  report(1, bad == 0 && t < 10.0,
         strf("relaxation optimum matches kappa*lambda_max on 100 "
              "single-target instances within 1e-6 relative "
              "(worst %.2e, %d misses, %.2fs of 10s budget)",
              worst_rel, bad, t));
}

// --- criterion 2: lifted-objective identity ----------------------------------

void criterion2() {
  Timer tm;
  Rng rng(202);
  double worst_abs = 0.0;
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const int M = 1 + i % 4;
    const int N = 1 + i % 3;
    const int K = 1 + i % 2;
    const int L = 1 + i % 3;
    const int Q = i % 3;
    const ChannelSet ch = random_channels(M, N, K, L, Q, rng);
    const Beamformer bf{random_vec(M, rng)};
    const PassiveProblem pp =
        build_passive_sdp(ch, bf, VecX::Constant(Q, 1.0e6));
    const int nk = N * K;
    VecXc bar(nk + 1);
    for (int j = 0; j <= nk; ++j)
      bar(j) = std::polar(1.0, rng.uniform(-3.14159, 3.14159));
    VecX phases(nk);
    for (int j = 0; j < nk; ++j)
      phases(j) = std::arg(bar(j) * std::conj(bar(nk)));
    const PhaseProfile prof(N, K, phases);

    for (int l = 0; l < L; ++l) {
      const MatXc& H = pp.sdp.objective_terms[l].first;
      const double lifted =
          (bar.adjoint() * H * bar)(0).real() + std::norm(pp.a(l));
      const double direct =
          illumination_power(ch, bf, prof, ObjectKind::target, l);
      const double err = std::abs(lifted - direct);
      worst_abs = std::max(worst_abs, err);
      if (!(err <= 1e-10)) ++bad;
    }
    for (int q = 0; q < Q; ++q) {
      const MatXc& G = pp.sdp.inequality_terms[q].first;
      const double lifted =
          (bar.adjoint() * G * bar)(0).real() + std::norm(pp.b(q));
      const double direct =
          illumination_power(ch, bf, prof, ObjectKind::clutter, q);
      const double err = std::abs(lifted - direct);
      worst_abs = std::max(worst_abs, err);
      if (!(err <= 1e-10)) ++bad;
    }
  }
  const double t = tm.sec();
  report(2, bad == 0 && t < 5.0,
         strf("lifted quadratic form plus direct-path power equals the "
              "physical illumination on 1000 instances within 1e-10 "
              "(worst %.2e, %d misses, %.2fs of 5s budget)",
              worst_abs, bad, t));
}

// --- criterion 3: grid-search near-optimality --------------------------------

// Fine phase grid with step <= 1e-3 rad for two reflecting elements.
constexpr int kGridN = 6284;

void criterion3() {
  Timer tm;
  Rng rng(303);
  std::vector<cxd> unit(kGridN);
  for (int j = 0; j < kGridN; ++j)
    unit[j] = std::polar(1.0, 2.0 * M_PI * j / kGridN);

  double worst_passive = std::numeric_limits<double>::infinity();
  double worst_joint = std::numeric_limits<double>::infinity();
  int bad = 0;

  for (int inst = 0; inst < 20; ++inst) {
    const int Q = inst % 2;
    const int M = 1 + inst % 3;
    const int N = (inst / 2) % 2 == 0 ? 2 : 1;
    const int K = (inst / 2) % 2 == 0 ? 1 : 2;
    const double kappa = rng.uniform(0.5, 2.0);
    const ChannelSet ch = random_channels(M, N, K, 1, Q, rng);
    VecXc t = random_vec(M, rng);
    t *= std::sqrt(kappa) / t.norm();
    const Beamformer bf{t};

    // Probe build to obtain the per-object scalars/vectors for the grid.
    const PassiveProblem probe =
        build_passive_sdp(ch, bf, VecX::Constant(Q, 1.0e30));
    const cxd a0 = probe.a(0);
    const VecXc& h = probe.h[0];

    VecX eta(Q);
    if (Q == 1) {
      const cxd b0 = probe.b(0);
      const VecXc& g = probe.g[0];
      double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
      for (int j1 = 0; j1 < kGridN; ++j1) {
        const cxd pc = b0 + std::conj(unit[j1]) * g(0);
        for (int j2 = 0; j2 < kGridN; ++j2) {
          const double c = std::norm(pc + std::conj(unit[j2]) * g(1));
          cmin = std::min(cmin, c);
          cmax = std::max(cmax, c);
        }
      }
      // The cap must sit above the direct-path return: a problem with
      // |b|^2 > eta is reported infeasible by contract, which would test the
      // flag rather than the rounding. Keep it binding by staying below the
      // grid maximum.
      const double base = std::max(cmin, std::norm(b0) * (1.0 + 1e-9));
      eta(0) = base < cmax ? base + (cmax - base) * rng.uniform(0.3, 0.7)
                           : 2.0 * base;
    }

    // Feasible grid maximum of the target illumination.
    double grid_best = 0.0;
    {
      const cxd b0 = Q == 1 ? probe.b(0) : cxd(0.0);
      const VecXc g = Q == 1 ? probe.g[0] : VecXc::Zero(2);
      for (int j1 = 0; j1 < kGridN; ++j1) {
        const cxd pa = a0 + std::conj(unit[j1]) * h(0);
        const cxd pc = b0 + std::conj(unit[j1]) * g(0);
        for (int j2 = 0; j2 < kGridN; ++j2) {
          if (Q == 1 &&
              std::norm(pc + std::conj(unit[j2]) * g(1)) > eta(0))
            continue;
          grid_best =
              std::max(grid_best, std::norm(pa + std::conj(unit[j2]) * h(1)));
        }
      }
    }

    // Rounded passive step on the same instance.
    double rounded = 0.0;
    bool step_ok = true;
    try {
      const PassiveProblem pp = build_passive_sdp(ch, bf, eta);
      const SdpSolution sol = solve_maxmin_sdp(pp.sdp);
      if (sol.status != SdpStatus::optimal) step_ok = false;
      const PhaseProfile prof = randomize_passive(pp, sol.X, 2000, rng);
      rounded = illumination_power(ch, bf, prof, ObjectKind::target, 0);
    } catch (const std::exception&) {
      step_ok = false;
    }
    const double ratio = step_ok ? rounded / grid_best : 0.0;
    worst_passive = std::min(worst_passive, ratio);
    if (!(ratio >= 0.95)) ++bad;

    // Joint alternation vs a joint grid on the clutter-free instances: for
    // one target the optimal transmitter for fixed phases is the matched
    // filter, so the joint optimum over the grid is kappa*max||a(theta)||^2.
    if (Q == 0) {
      VecXc c0 = ch.h_t[0].conjugate();
      std::vector<VecXc> cn;
      for (int k = 0; k < K; ++k)
        for (int j = 0; j < N; ++j)
          cn.push_back(std::conj(ch.h_i[k][0](j)) * ch.D[k].adjoint().col(j));
      const double nc2 = cn[1].squaredNorm();
      double best = 0.0;
      for (int j1 = 0; j1 < kGridN; ++j1) {
        const VecXc p = c0 + unit[j1] * cn[0];
        const double np = p.squaredNorm();
        const cxd z = p.dot(cn[1]);
        for (int j2 = 0; j2 < kGridN; ++j2) {
          const double v = np + nc2 + 2.0 * (unit[j2] * z).real();
          best = std::max(best, v);
        }
      }
      const double joint_grid = kappa * best;

      Scenario s = matching_scenario(M, N, K, 1, 0, kappa);
      s.trials_I = 1000;
      Rng jr(Rng::derive(909, {static_cast<std::uint64_t>(inst)}));
      const DesignResult res = joint_design(ch, s, jr);
      const double jratio = res.min_power() / joint_grid;
      worst_joint = std::min(worst_joint, jratio);
      if (!(jratio >= 0.90)) ++bad;
    }
  }
  const double t = tm.sec();
  report(3, bad == 0 && t < 120.0,
         strf("rounded reflect step within 5%% of a 1e-3 rad exhaustive grid "
              "and joint alternation within 10%% of the joint grid "
              "(worst ratios %.4f / %.4f, %d misses, %.1fs of 120s budget)",
              worst_passive, worst_joint, bad, t));
}

// --- criteria 4-7: desk-scale sweep properties -------------------------------

struct DeskCell {
  double sum = 0.0;
  int feasible = 0;
  int blocked = 0;
  int runs = 0;
  double mean() const { return feasible > 0 ? sum / feasible : 0.0; }
  double pb() const { return runs > 0 ? double(blocked) / runs : 0.0; }
};

const std::vector<double> kKappas{0.05, 0.10, 0.15, 0.20, 0.25};
constexpr int kR = 50;
const std::vector<DesignKind> kDesigns{DesignKind::joint,
                                       DesignKind::active_only,
                                       DesignKind::passive_only,
                                       DesignKind::no_irs};

void desk_criteria() {
  Timer tm;
  const Scenario desk = desk_scenario();
  const double thresh = desk.blockage_threshold_watts;

  bool c4_ok = true;
  std::string c4_note = "all feasibility and unit-modulus bounds hold";
  double worst_power_slack = 0.0, worst_clutter_slack = 0.0,
         worst_modulus = 0.0;
  bool c5_mono = true;
  int joint_runs = 0, joint_converged = 0;
  DeskCell cells[4][5];

  for (int r = 0; r < kR; ++r) {
    Rng ch_rng(Rng::derive(desk.seed, {1, static_cast<std::uint64_t>(r)}));
    const auto targets = sample_target_positions(desk, desk.L, ch_rng);
    const ChannelSet ch = realize_channels(desk, targets, ch_rng);
    for (int ki = 0; ki < 5; ++ki) {
      Scenario sc = desk;
      sc.kappa_watts = kKappas[ki];
      const std::uint64_t task_seed = Rng::derive(
          desk.seed,
          {2, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(ki)});
      for (int di = 0; di < 4; ++di) {
        Rng rng(task_seed);
        const DesignResult res =
            detail::run_one_design(kDesigns[di], ch, sc, rng);

        if (res.status != DesignStatus::infeasible) {
          worst_power_slack = std::max(
              worst_power_slack, res.beamformer.power() - sc.kappa_watts);
          if (res.beamformer.power() > sc.kappa_watts + 1e-9) c4_ok = false;
          for (int q = 0; q < ch.Q; ++q) {
            worst_clutter_slack =
                std::max(worst_clutter_slack,
                         res.per_clutter_power(q) - sc.eta_watts[q]);
            if (res.per_clutter_power(q) > sc.eta_watts[q] + 1e-9)
              c4_ok = false;
          }
          const VecXc th = res.phases.complex();
          for (int j = 0; j < th.size(); ++j) {
            if (!std::isfinite(res.phases.phases()(j))) c4_ok = false;
            worst_modulus =
                std::max(worst_modulus, std::abs(std::abs(th(j)) - 1.0));
          }
        }

        for (std::size_t i = 1; i < res.min_power_trajectory.size(); ++i)
          if (res.min_power_trajectory[i] < res.min_power_trajectory[i - 1])
            c5_mono = false;
        if (kDesigns[di] == DesignKind::joint) {
          ++joint_runs;
          if (res.status == DesignStatus::converged) ++joint_converged;
        }

        DeskCell& cell = cells[di][ki];
        ++cell.runs;
        if (res.status == DesignStatus::infeasible) {
          ++cell.blocked;
        } else {
          cell.sum += res.min_power();
          ++cell.feasible;
          if (res.min_power() < thresh) ++cell.blocked;
        }
      }
    }
  }
  const double sweep_sec = tm.sec();

  // Unit modulus is exact by construction (the profile stores phase angles);
  // materializing e^{i*phase} costs at most one ulp in the modulus.
  if (worst_modulus > 2.3e-16) c4_ok = false;
  report(4, c4_ok,
         strf("desk sweep feasibility closure: power slack %.2e <= 1e-9, "
              "clutter slack %.2e <= 1e-9, phases unit-modulus by "
              "representation (materialized |.| off by %.2e <= 1 ulp)",
              worst_power_slack, worst_clutter_slack, worst_modulus));

  const double conv_frac =
      joint_runs > 0 ? double(joint_converged) / joint_runs : 0.0;
  report(5, c5_mono && conv_frac >= 0.95,
         strf("all %d trajectories non-decreasing; %.1f%% of %d joint runs "
              "converged within 20 rounds (>= 95%% required)",
              4 * 5 * kR, 100.0 * conv_frac, joint_runs));

  const DeskCell& jt = cells[0][4];
  const DeskCell& ao = cells[1][4];
  const DeskCell& po = cells[2][4];
  const DeskCell& ni = cells[3][4];
  const bool c6 = jt.mean() >= ao.mean() && jt.mean() >= po.mean() &&
                  jt.mean() >= ni.mean() && jt.pb() <= ni.pb() - 0.05 &&
                  sweep_sec < 1800.0;
  report(6, c6,
         strf("at kappa=0.25W mean min power joint %.3e >= active %.3e, "
              "reflect-only %.3e, direct-only %.3e; Pb %.2f <= %.2f - 0.05; "
              "sweep took %.0fs of 1800s budget",
              jt.mean(), ao.mean(), po.mean(), ni.mean(), jt.pb(), ni.pb(),
              sweep_sec));

  // Trend checks on this sweep plus the denser-clutter comparison sweep.
  bool c7 = true;
  std::string c7_note;
  for (int di = 0; di < 4; ++di) {
    std::vector<double> means, pbs;
    for (int ki = 0; ki < 5; ++ki) {
      means.push_back(cells[di][ki].mean());
      pbs.push_back(cells[di][ki].pb());
    }
    const double rho_p = spearman(means, kKappas);
    const double rho_b = spearman(pbs, kKappas);
    if (!(rho_p > 0.0) || !(rho_b < 0.0)) c7 = false;
    c7_note += strf("%s%s rho(power)=%.2f rho(Pb)=%.2f", di ? "; " : "",
                    to_string(kDesigns[di]), rho_p, rho_b);
  }

  SweepSpec nine;
  nine.scenario = desk_scenario();
  apply_clutter_preset(nine.scenario, "q9");
  nine.kappa_values = kKappas;
  nine.realizations = kR;
  const MetricsReport dense = run_sweep(nine);
  int worse = 0;
  for (const CellMetrics& cell : dense.aggregates) {
    int di = 0;
    while (kDesigns[di] != cell.design) ++di;
    int ki = 0;
    while (kKappas[ki] != cell.kappa_watts) ++ki;
    if (cell.mean_min_power_watts > cells[di][ki].mean()) ++worse;
  }
  report(7, c7 && worse == 0,
         strf("%s; dense 9-object clutter lowers mean power in all 20 cells "
              "(%d exceptions)",
              c7_note.c_str(), worse));
}

// --- criterion 8: bitwise determinism ----------------------------------------

// Masks the final (wall-clock) column of 8-field rows; elapsed time is the
// one legitimately nondeterministic field in the output.
std::string mask_wall(const std::string& csv) {
  std::string out;
  out.reserve(csv.size());
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (std::count(line.begin(), line.end(), ',') == 7)
      line = line.substr(0, line.rfind(',') + 1) + "*";
    out += line;
    out += '\n';
  }
  return out;
}

void criterion8() {
  SweepSpec spec;
  spec.scenario = desk_scenario();
  spec.kappa_values = kKappas;
  spec.realizations = kR;
  const std::string first = emit_report(run_sweep(spec), ReportFormat::csv);
  const std::string second = emit_report(run_sweep(spec), ReportFormat::csv);
  const bool same = mask_wall(first) == mask_wall(second);
  report(8, same,
         strf("repeated desk sweep is bitwise-identical CSV over %zu bytes "
              "(wall_ms column masked: wall-clock timing is inherently "
              "nondeterministic)",
              first.size()));
}

}  // namespace

int main() {
  Timer total;
  std::printf("acceptance: 8 criteria on solver, designs, and sweep\n");
  criterion1();
  criterion2();
  criterion3();
  desk_criteria();
  criterion8();
  std::printf("acceptance: %d of 8 failed, %.0fs total\n", failures,
              total.sec());
  return failures == 0 ? 0 : 1;
}
