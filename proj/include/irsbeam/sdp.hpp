// SPDX-License-Identifier: Apache-2.0
//
// irsbeam: joint active/passive beamforming simulator for IRS-assisted radar
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Max-min semidefinite relaxation over complex Hermitian matrices:
//
//   max_{X >= 0}  min_l  tr(A_l X) + c_l
//   subject to    tr(X) <= kappa            (trace-bound mode)
//        or       X_ll = 1 for all l        (unit-diagonal mode)
//   and           tr(C_q X) <= d_q          (optional inequalities)
//
// The complex problem is lifted to a real symmetric one through the standard
// embedding  A = P + iQ  ->  [[P, -Q], [Q, P]]  (so real traces double), the
// epigraph variable t enters as a free scalar, and bound/inequality slacks
// become 1x1 cone blocks. Inputs are normalized before the interior-point
// solve (trace bound folded into the data, inequality rows scaled by their
// Frobenius norm, objective scaled to unit magnitude) and the solution is
// mapped back afterwards; the reported status is downgraded honestly if the
// recovered complex solution fails a feasibility re-check.
//
// sample_gaussian draws x ~ CN(0, X) vectors for randomized rounding.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "irsbeam/common.hpp"
#include "irsbeam/rng.hpp"
#include "irsbeam/sdp_core.hpp"

namespace irsbeam {

enum class SdpStatus { optimal, infeasible, max_iterations, numerical_failure };

struct SdpProblem {
  int n = 0;
  // Objective rows (A_l, c_l): maximize the minimum of tr(A_l X) + c_l.
  std::vector<std::pair<MatXc, double>> objective_terms;
  std::optional<double> trace_bound;
  bool unit_diagonal = false;
  // Inequality rows (C_q, d_q): tr(C_q X) <= d_q.
  std::vector<std::pair<MatXc, double>> inequality_terms;
};

struct SdpOptions {
  double tol = 1.0e-7;
  int max_iterations = 100;
};

struct SdpSolution {
  MatXc X;
  double objective_value = 0.0;
  SdpStatus status = SdpStatus::numerical_failure;
  int iterations = 0;
  double duality_gap = 0.0;
};

namespace detail {

inline MatX embed_hermitian(const MatXc& a) {
  const int n = static_cast<int>(a.rows());
  MatX e(2 * n, 2 * n);
  const MatX p = a.real();
  const MatX q = a.imag();
  e.topLeftCorner(n, n) = p;
  e.bottomRightCorner(n, n) = p;
  e.topRightCorner(n, n) = -q;
  e.bottomLeftCorner(n, n) = q;
  return e;
}

inline MatXc extract_hermitian(const MatX& e) {
  const int n = static_cast<int>(e.rows()) / 2;
  MatXc x(n, n);
  x.real() = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  x.imag() = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  return MatXc(0.5 * (x + x.adjoint()));
}

inline void check_hermitian(const MatXc& a, int n, const char* what) {
  if (a.rows() != n || a.cols() != n)
    throw invalid_input(std::string(what) + ": matrix is not n x n");
  if (!a.allFinite())
    throw invalid_input(std::string(what) + ": matrix has non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1.0e-12 * scale)
    throw invalid_input(std::string(what) + ": matrix is not Hermitian");
}

}  // namespace detail

inline SdpSolution solve_maxmin_sdp(const SdpProblem& prob,
                                    const SdpOptions& opt = {}) {
  const int n = prob.n;
  const int L = static_cast<int>(prob.objective_terms.size());
  const int Q = static_cast<int>(prob.inequality_terms.size());

  if (n < 1) throw invalid_input("solve_maxmin_sdp: n must be >= 1");
  if (L < 1)
    throw invalid_input("solve_maxmin_sdp: at least one objective term");
  const bool mode_trace = prob.trace_bound.has_value();
  if (mode_trace == prob.unit_diagonal)
    throw invalid_input(
        "solve_maxmin_sdp: exactly one of trace_bound / unit_diagonal");
  if (mode_trace && *prob.trace_bound <= 0.0)
    throw invalid_input("solve_maxmin_sdp: trace_bound must be positive");

  std::vector<MatXc> A(L);
  VecX c(L);
  for (int l = 0; l < L; ++l) {
    detail::check_hermitian(prob.objective_terms[l].first, n,
                            "objective term");
    A[l] = 0.5 * (prob.objective_terms[l].first +
                  prob.objective_terms[l].first.adjoint());
    c(l) = prob.objective_terms[l].second;
    if (!std::isfinite(c(l)))
      throw invalid_input("solve_maxmin_sdp: non-finite objective offset");
  }
  std::vector<MatXc> Cq(Q);
  VecX d(Q);
  for (int q = 0; q < Q; ++q) {
    detail::check_hermitian(prob.inequality_terms[q].first, n,
                            "inequality term");
    Cq[q] = 0.5 * (prob.inequality_terms[q].first +
                   prob.inequality_terms[q].first.adjoint());
    d(q) = prob.inequality_terms[q].second;
    if (!std::isfinite(d(q)))
      throw invalid_input("solve_maxmin_sdp: non-finite inequality bound");
    if (mode_trace && d(q) < 0.0)
      throw invalid_input(
          "solve_maxmin_sdp: inequality bounds must be >= 0 with a trace "
          "bound");
  }

  // Normalization. With a trace bound the substitution X = kappa * Xhat
  // folds kappa into the data; each inequality row is scaled to unit
  // Frobenius norm and the objective rows share one magnitude scale.
  const double kappa = mode_trace ? *prob.trace_bound : 1.0;
  constexpr double tiny = 1.0e-300;
  double s_obj = 0.0;
  for (int l = 0; l < L; ++l)
    s_obj = std::max(s_obj, kappa * A[l].norm() + std::abs(c(l)));
  if (s_obj < tiny) s_obj = 1.0;
  // Row equilibration includes |d| so a vacuous cap (zero matrix, e.g. a
  // fully blocked clutter object) scales to 0 <= 2 instead of dividing the
  // right-hand side by the floor.
  VecX s_ineq(Q);
  for (int q = 0; q < Q; ++q)
    s_ineq(q) = std::max({kappa * Cq[q].norm(), std::abs(d(q)), tiny});

  // Real cone layout: block 0 is the 2n x 2n embedding; then one 1x1 slack
  // per objective row, per inequality row, and (trace mode) the trace bound.
  sdpcore::Problem core;
  const int n_slack = L + Q + (mode_trace ? 1 : 0);
  core.dims.resize(1 + n_slack, 1);
  core.dims[0] = 2 * n;
  core.C.resize(1 + n_slack);  // zero objective on the cone

  const int m = L + Q + (mode_trace ? 1 : n);
  core.b = VecX::Zero(m);
  core.Bfree = MatX::Zero(m, 1);
  core.cfree = VecX::Constant(1, -1.0);  // min -t

  int row = 0;
  for (int l = 0; l < L; ++l, ++row) {
    // tr(A_l X) + c_l - t - u_l = 0, doubled by the embedding convention.
    sdpcore::Constraint con;
    const MatXc an = (kappa / s_obj) * A[l];
    if (an.norm() > 0.0)
      con.terms.push_back({0, detail::embed_hermitian(an), {}});
    con.terms.push_back({1 + l, {}, {{0, 0, -2.0}}});
    core.cons.push_back(std::move(con));
    core.Bfree(row, 0) = -2.0;
    core.b(row) = -2.0 * c(l) / s_obj;
  }
  for (int q = 0; q < Q; ++q, ++row) {
    sdpcore::Constraint con;
    const MatXc cn = (kappa / s_ineq(q)) * Cq[q];
    if (cn.norm() > 0.0)
      con.terms.push_back({0, detail::embed_hermitian(cn), {}});
    con.terms.push_back({1 + L + q, {}, {{0, 0, 2.0}}});
    core.cons.push_back(std::move(con));
    core.b(row) = 2.0 * d(q) / s_ineq(q);
  }
  if (mode_trace) {
    // tr(Xhat) + p = 1.
    sdpcore::Constraint con;
    sdpcore::BlockTerm eye;
    eye.block = 0;
    for (int i = 0; i < 2 * n; ++i) eye.sparse.push_back({i, i, 1.0});
    con.terms.push_back(std::move(eye));
    con.terms.push_back({1 + L + Q, {}, {{0, 0, 2.0}}});
    core.cons.push_back(std::move(con));
    core.b(row) = 2.0;
    ++row;
  } else {
    for (int i = 0; i < n; ++i, ++row) {
      sdpcore::Constraint con;
      con.terms.push_back({0, {}, {{i, i, 1.0}, {n + i, n + i, 1.0}}});
      core.cons.push_back(std::move(con));
      core.b(row) = 2.0;
    }
  }

  sdpcore::Options copt;
  copt.tol = opt.tol;
  copt.max_iter = opt.max_iterations;
  const sdpcore::Result res = sdpcore::solve(core, copt);

  SdpSolution sol;
  sol.iterations = res.iterations;
  sol.duality_gap = s_obj * std::abs(res.pobj - res.dobj);
  switch (res.status) {
    case sdpcore::Status::optimal: sol.status = SdpStatus::optimal; break;
    case sdpcore::Status::infeasible: sol.status = SdpStatus::infeasible; break;
    case sdpcore::Status::max_iterations:
      sol.status = SdpStatus::max_iterations;
      break;
    default: sol.status = SdpStatus::numerical_failure; break;
  }
  if (sol.status == SdpStatus::infeasible) return sol;

  sol.X = kappa * detail::extract_hermitian(res.X[0]);
  double min_obj = std::numeric_limits<double>::infinity();
  for (int l = 0; l < L; ++l)
    min_obj = std::min(min_obj, (A[l] * sol.X).trace().real() + c(l));
  sol.objective_value = min_obj;

  if (sol.status == SdpStatus::optimal) {
    // Re-check the recovered complex solution; a downgrade here means the
    // embedding round trip lost more accuracy than the solver tolerance.
    bool ok = sol.X.allFinite();
    if (ok) {
      Eigen::SelfAdjointEigenSolver<MatXc> es(sol.X, Eigen::EigenvaluesOnly);
      const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
      ok = es.eigenvalues().minCoeff() >= -1.0e-8 * std::max(1.0, lam_max);
    }
    if (ok && mode_trace)
      ok = sol.X.trace().real() <= kappa * (1.0 + 1.0e-6) + 1.0e-12;
    if (ok && !mode_trace)
      for (int i = 0; i < n && ok; ++i)
        ok = std::abs(sol.X(i, i).real() - 1.0) <= 1.0e-6;
    for (int q = 0; q < Q && ok; ++q)
      ok = (Cq[q] * sol.X).trace().real() <=
           d(q) + 1.0e-6 * (s_ineq(q) + std::abs(d(q))) + 1.0e-12;
    if (!ok) sol.status = SdpStatus::numerical_failure;
  }
  return sol;
}

// Draw `count` samples x ~ CN(0, X) via the eigenfactorization of X.
// Eigenvalues below -1e-9 * lambda_max are rejected; small negative values
// from solver roundoff are clipped to zero.
inline MatXc sample_gaussian(const MatXc& X, int count, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  if (n < 1 || X.cols() != n)
    throw invalid_input("sample_gaussian: covariance must be square");
  if (count < 1) throw invalid_input("sample_gaussian: count must be >= 1");
  detail::check_hermitian(X, n, "sample_gaussian covariance");

  Eigen::SelfAdjointEigenSolver<MatXc> es(0.5 * (X + X.adjoint()));
  if (es.info() != Eigen::Success)
    throw invalid_input("sample_gaussian: eigenfactorization failed");
  VecX lam = es.eigenvalues();
  const double lam_max = std::max(lam.maxCoeff(), 0.0);
  if (lam.minCoeff() < -1.0e-9 * std::max(1.0, lam_max))
    throw invalid_input("sample_gaussian: covariance not positive "
                        "semidefinite");
  lam = lam.cwiseMax(0.0);
  const MatXc f = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();

  MatXc out(n, count);
  VecXc z(n);
  for (int s = 0; s < count; ++s) {
    for (int i = 0; i < n; ++i) z(i) = rng.cgaussian();
    out.col(s) = f * z;
  }
  return out;
}

}  // namespace irsbeam
