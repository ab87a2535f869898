// SPDX-License-Identifier: Apache-2.0
//
// irsbeam: joint active/passive beamforming simulator for IRS-assisted radar
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Dense primal-dual interior-point solver for semidefinite programs over a
// block-diagonal symmetric cone, with optional free (unconstrained) scalar
// variables:
//
//   (P)  min <C, X> + cf' f   s.t.  <A_i, X> + (Bf f)_i = b_i,  X >= 0
//   (D)  max b' y             s.t.  sum_i y_i A_i + Z = C,  Bf' y = cf,
//                                   Z >= 0
//
// The search direction is the Nesterov-Todd direction with a Mehrotra
// predictor-corrector step. Per block the NT scaling point W (W Z W = X) is
// factored as W = G G' with G = L_z^{-T} U diag(lambda)^{1/4}, where
// Z = L_z L_z' and L_z' X L_z = U diag(lambda) U'. In the scaled space
// V := G^{-1} X G^{-T} = G' Z G = diag(sqrt(lambda)) is diagonal, which makes
// the Newton equation for the symmetrized complementarity a trivially
// solvable Lyapunov system:
//
//   V S + S V = 2 (sigma*mu*I - V^2 - sym(Dx Dz)),   S = Dx + Dz,
//
// giving dX = G S G' - W dZ W. Eliminating dX and dZ yields the Schur system
// M dy = r with M_ij = sum_blocks tr(A_i W A_j W), bordered by the free
// variable columns. Constraint matrices may be stored dense or as sparse
// symmetric entry lists; the Schur assembly exploits sparsity pairwise.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "irsbeam/common.hpp"

namespace irsbeam::sdpcore {

// One symmetric coefficient entry; r <= c, representing both (r,c) and (c,r).
struct SymEntry {
  int r = 0;
  int c = 0;
  double v = 0.0;
};

// Coefficient of one constraint on one block: dense matrix or sparse entries.
struct BlockTerm {
  int block = 0;
  MatX dense;
  std::vector<SymEntry> sparse;
  bool is_sparse() const { return !sparse.empty(); }
};

struct Constraint {
  std::vector<BlockTerm> terms;
};

struct Problem {
  std::vector<int> dims;           // block dimensions
  std::vector<MatX> C;             // objective blocks (may be empty => zero)
  std::vector<Constraint> cons;    // m constraints
  VecX b;                          // m
  MatX Bfree;                      // m x nf (nf == 0 when absent)
  VecX cfree;                      // nf
};

enum class Status { optimal, infeasible, max_iterations, numerical_failure };

struct Result {
  Status status = Status::numerical_failure;
  std::vector<MatX> X, Z;
  VecX y, f;
  double pobj = 0.0, dobj = 0.0;
  double rel_gap = 0.0, rel_primal = 0.0, rel_dual = 0.0;
  int iterations = 0;
};

struct Options {
  double tol = 1.0e-7;
  int max_iter = 100;
  double tau = 0.98;               // fraction-to-boundary damping
  double infeas_obj = 1.0e8;       // dual objective divergence threshold
};

namespace detail {

inline double inner_dense(const MatX& a, const MatX& t) {
  return a.cwiseProduct(t).sum();
}

inline double inner_sparse(const std::vector<SymEntry>& a, const MatX& t) {
  double s = 0.0;
  for (const auto& e : a)
    s += (e.r == e.c) ? e.v * t(e.r, e.c) : 2.0 * e.v * t(e.r, e.c);
  return s;
}

inline double inner_term(const BlockTerm& term, const MatX& t) {
  return term.is_sparse() ? inner_sparse(term.sparse, t)
                          : inner_dense(term.dense, t);
}

// tr(A W A' W) for two sparse symmetric coefficient lists; entries are
// expanded to their full (r,c)/(c,r) form on the fly.
inline double sparse_pair(const std::vector<SymEntry>& a,
                          const std::vector<SymEntry>& b, const MatX& w) {
  double s = 0.0;
  auto each = [](const SymEntry& e, auto&& fn) {
    fn(e.r, e.c, e.v);
    if (e.r != e.c) fn(e.c, e.r, e.v);
  };
  for (const auto& ea : a)
    each(ea, [&](int ra, int ca, double va) {
      for (const auto& eb : b)
        each(eb, [&](int rb, int cb, double vb) {
          s += va * vb * w(ca, rb) * w(cb, ra);
        });
    });
  return s;
}

inline void add_term(MatX& acc, const BlockTerm& term, double coef) {
  if (term.is_sparse()) {
    for (const auto& e : term.sparse) {
      acc(e.r, e.c) += coef * e.v;
      if (e.r != e.c) acc(e.c, e.r) += coef * e.v;
    }
  } else {
    acc.noalias() += coef * term.dense;
  }
}

inline double term_norm(const BlockTerm& term) {
  if (!term.is_sparse()) return term.dense.norm();
  double s = 0.0;
  for (const auto& e : term.sparse) s += (e.r == e.c ? 1.0 : 2.0) * e.v * e.v;
  return std::sqrt(s);
}

// Largest step alpha with S + alpha*D >= 0, given S > 0 (Cholesky of S).
inline double max_step(const Eigen::LLT<MatX>& llt, const MatX& d) {
  const MatX l = llt.matrixL();
  MatX m = l.triangularView<Eigen::Lower>().solve(d);
  m = l.triangularView<Eigen::Lower>().solve(MatX(m.transpose()));
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (m + m.transpose()),
                                         Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lam_min;
}

}  // namespace detail

inline Result solve(const Problem& prob, const Options& opt = {}) {
  using detail::add_term;
  using detail::inner_term;

  const int nblk = static_cast<int>(prob.dims.size());
  const int m = static_cast<int>(prob.cons.size());
  const int nf = static_cast<int>(prob.cfree.size());
  const int ktot = m + nf;

  double total_dim = 0.0;
  int max_dim = 1;
  for (int d : prob.dims) {
    total_dim += d;
    max_dim = std::max(max_dim, d);
  }

  // Data norms feeding the starting-point heuristic and relative residuals.
  double max_a_norm = 0.0, max_b_over_a = 0.0;
  for (int i = 0; i < m; ++i) {
    double ni = 0.0;
    for (const auto& t : prob.cons[i].terms) ni += detail::term_norm(t);
    if (nf > 0) ni += prob.Bfree.row(i).norm();
    max_a_norm = std::max(max_a_norm, ni);
    max_b_over_a = std::max(max_b_over_a, std::abs(prob.b(i)) / (1.0 + ni));
  }
  double c_norm = 0.0;
  for (const auto& cb : prob.C)
    if (cb.size() > 0) c_norm = std::max(c_norm, cb.norm());
  for (int i = 0; i < nf; ++i)
    c_norm = std::max(c_norm, std::abs(prob.cfree(i)));

  const double zeta_p =
      std::max({10.0, std::sqrt(static_cast<double>(max_dim)),
                static_cast<double>(max_dim) * max_b_over_a});
  const double zeta_d = std::max({10.0, std::sqrt(static_cast<double>(max_dim)),
                                  max_a_norm, c_norm});

  std::vector<MatX> X(nblk), Z(nblk);
  for (int blk = 0; blk < nblk; ++blk) {
    X[blk] = zeta_p * MatX::Identity(prob.dims[blk], prob.dims[blk]);
    Z[blk] = zeta_d * MatX::Identity(prob.dims[blk], prob.dims[blk]);
  }
  VecX y = VecX::Zero(m), f = VecX::Zero(nf);

  const double b_norm = m > 0 ? prob.b.norm() : 0.0;

  Result res;
  res.status = Status::max_iterations;
  // Seed the reported iterate so every exit path carries one, including a
  // divergence detected before the first iterate is stored.
  res.X = X;
  res.Z = Z;
  res.y = y;
  res.f = f;

  std::vector<MatX> W(nblk), G(nblk), Gi(nblk), WRdW(nblk), Rd(nblk);
  std::vector<VecX> vdiag(nblk);
  std::vector<std::vector<MatX>> T(m);  // W A_i W per dense term, per block
  std::vector<MatX> dXa(nblk), dZa(nblk), dX(nblk), dZ(nblk), Rc(nblk);

  double mu_prev = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    // Residuals.
    VecX rp = prob.b;
    for (int i = 0; i < m; ++i)
      for (const auto& t : prob.cons[i].terms)
        rp(i) -= inner_term(t, X[t.block]);
    if (nf > 0) rp -= prob.Bfree * f;

    double rd_sq = 0.0;
    for (int blk = 0; blk < nblk; ++blk) {
      Rd[blk] = -Z[blk];
      if (prob.C[blk].size() > 0) Rd[blk] += prob.C[blk];
    }
    for (int i = 0; i < m; ++i)
      for (const auto& t : prob.cons[i].terms) add_term(Rd[t.block], t, -y(i));
    for (int blk = 0; blk < nblk; ++blk) rd_sq += Rd[blk].squaredNorm();
    VecX rf;
    if (nf > 0) {
      rf = prob.cfree - prob.Bfree.transpose() * y;
      rd_sq += rf.squaredNorm();
    }

    double pobj = nf > 0 ? prob.cfree.dot(f) : 0.0;
    for (int blk = 0; blk < nblk; ++blk)
      if (prob.C[blk].size() > 0) pobj += detail::inner_dense(prob.C[blk], X[blk]);
    const double dobj = m > 0 ? prob.b.dot(y) : 0.0;

    double gap_inner = 0.0;
    for (int blk = 0; blk < nblk; ++blk)
      gap_inner += detail::inner_dense(X[blk], Z[blk]);
    const double mu = gap_inner / total_dim;

    const double rel_p = rp.size() ? rp.norm() / (1.0 + b_norm) : 0.0;
    const double rel_d = std::sqrt(rd_sq) / (1.0 + c_norm);
    const double rel_gap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    // A diverging iterate has stopped carrying information; report the last
    // finite one instead of overwriting it.
    if (!std::isfinite(mu) || !std::isfinite(pobj) || !std::isfinite(dobj) ||
        !std::isfinite(rel_p) || !std::isfinite(rel_d)) {
      res.status = Status::numerical_failure;
      return res;
    }

    res.X = X;
    res.Z = Z;
    res.y = y;
    res.f = f;
    res.pobj = pobj;
    res.dobj = dobj;
    res.rel_gap = rel_gap;
    res.rel_primal = rel_p;
    res.rel_dual = rel_d;
    res.iterations = iter;

    if (rel_p <= opt.tol && rel_d <= opt.tol && rel_gap <= opt.tol) {
      res.status = Status::optimal;
      return res;
    }
    // A diverging dual objective whose residual stays small relative to the
    // divergence means y/dobj is a near-exact Farkas ray (<b,y> = dobj > 0,
    // sum_i y_i A_i + Z ~ C with error O(1e-7 * dobj)), certifying primal
    // infeasibility. The residual must be scaled by dobj: the ray's absolute
    // residual grows with its magnitude even as the certificate sharpens.
    if (dobj > opt.infeas_obj &&
        std::sqrt(rd_sq) <= 1.0e-7 * std::max(1.0, dobj)) {
      res.status = Status::infeasible;
      return res;
    }
    if (iter == opt.max_iter) break;

    // Progress guard: complementarity refusing to move means the iteration
    // has hit the limits of double precision.
    if (mu > 0.99 * mu_prev && rel_p < 1e-10 && rel_d < 1e-10)
      ++stall;
    else
      stall = 0;
    if (stall >= 8) {
      res.status = Status::numerical_failure;
      return res;
    }
    mu_prev = mu;

    // NT scaling per block.
    std::vector<Eigen::LLT<MatX>> lltX(nblk), lltZ(nblk);
    bool factor_ok = true;
    for (int blk = 0; blk < nblk && factor_ok; ++blk) {
      lltZ[blk].compute(Z[blk]);
      lltX[blk].compute(X[blk]);
      if (lltZ[blk].info() != Eigen::Success ||
          lltX[blk].info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      const MatX lz = lltZ[blk].matrixL();
      MatX mid = lz.transpose() * X[blk] * lz;
      Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (mid + mid.transpose()));
      if (es.info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      VecX lam = es.eigenvalues().cwiseMax(1.0e-60);
      vdiag[blk] = lam.cwiseSqrt();
      const VecX lam4 = lam.array().pow(0.25).matrix();
      // G = L_z^{-T} U diag(lam)^{1/4}; its inverse needs no solve.
      MatX u = es.eigenvectors();
      G[blk] = lz.transpose()
                   .triangularView<Eigen::Upper>()
                   .solve(MatX(u * lam4.asDiagonal()));
      Gi[blk] = lam4.cwiseInverse().asDiagonal() * u.transpose() *
                lz.transpose();
      W[blk].noalias() = G[blk] * G[blk].transpose();
    }
    if (!factor_ok) {
      res.status = Status::numerical_failure;
      return res;
    }

    for (int blk = 0; blk < nblk; ++blk)
      WRdW[blk].noalias() = W[blk] * Rd[blk] * W[blk];

    // Schur complement M_ij = sum_blk tr(A_i W A_j W), bordered by Bfree.
    for (int i = 0; i < m; ++i) {
      T[i].assign(prob.cons[i].terms.size(), MatX());
      for (std::size_t ti = 0; ti < prob.cons[i].terms.size(); ++ti) {
        const auto& t = prob.cons[i].terms[ti];
        if (!t.is_sparse())
          T[i][ti].noalias() = W[t.block] * t.dense * W[t.block];
      }
    }
    MatX K = MatX::Zero(ktot, ktot);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double s = 0.0;
        for (std::size_t ti = 0; ti < prob.cons[i].terms.size(); ++ti) {
          const auto& ta = prob.cons[i].terms[ti];
          for (std::size_t tj = 0; tj < prob.cons[j].terms.size(); ++tj) {
            const auto& tb = prob.cons[j].terms[tj];
            if (ta.block != tb.block) continue;
            if (!ta.is_sparse())
              s += inner_term(tb, T[i][ti]);
            else if (!tb.is_sparse())
              s += inner_term(ta, T[j][tj]);
            else
              s += detail::sparse_pair(ta.sparse, tb.sparse, W[ta.block]);
          }
        }
        K(i, j) = s;
        K(j, i) = s;
      }
    }
    if (nf > 0) {
      K.block(0, m, m, nf) = prob.Bfree;
      K.block(m, 0, nf, m) = prob.Bfree.transpose();
    }
    Eigen::PartialPivLU<MatX> lu(K);

    // One backsolve: given per-block Rc, produce (dy, df, dZ, dX).
    auto direction = [&](const std::vector<MatX>& rc, VecX& dy, VecX& df,
                         std::vector<MatX>& dz, std::vector<MatX>& dx) {
      VecX rhs(ktot);
      for (int i = 0; i < m; ++i) {
        double s = rp(i);
        for (const auto& t : prob.cons[i].terms) {
          s -= inner_term(t, rc[t.block]);
          s += inner_term(t, WRdW[t.block]);
        }
        rhs(i) = s;
      }
      for (int i = 0; i < nf; ++i) rhs(m + i) = rf(i);
      const VecX sol = lu.solve(rhs);
      dy = sol.head(m);
      df = sol.tail(nf);
      for (int blk = 0; blk < nblk; ++blk) dz[blk] = Rd[blk];
      for (int i = 0; i < m; ++i)
        for (const auto& t : prob.cons[i].terms)
          add_term(dz[t.block], t, -dy(i));
      for (int blk = 0; blk < nblk; ++blk) {
        dx[blk].noalias() = rc[blk] - W[blk] * dz[blk] * W[blk];
        dx[blk] = 0.5 * (dx[blk] + dx[blk].transpose()).eval();
      }
    };

    // Predictor (affine scaling): Rc = -X exactly.
    VecX dya, dfa;
    for (int blk = 0; blk < nblk; ++blk) Rc[blk] = -X[blk];
    direction(Rc, dya, dfa, dZa, dXa);

    double ap = 1.0, ad = 1.0;
    for (int blk = 0; blk < nblk; ++blk) {
      ap = std::min(ap, detail::max_step(lltX[blk], dXa[blk]));
      ad = std::min(ad, detail::max_step(lltZ[blk], dZa[blk]));
    }
    double gap_aff = 0.0;
    for (int blk = 0; blk < nblk; ++blk)
      gap_aff += detail::inner_dense(X[blk] + ap * dXa[blk],
                                     Z[blk] + ad * dZa[blk]);
    gap_aff = std::max(gap_aff, 0.0);
    const double mu_aff = gap_aff / total_dim;
    double sigma = mu > 0.0 ? std::pow(mu_aff / mu, 3.0) : 0.1;
    sigma = std::min(1.0, std::max(sigma, 1.0e-10));

    // Corrector via the diagonal Lyapunov solve in scaled space.
    for (int blk = 0; blk < nblk; ++blk) {
      const MatX dxs = Gi[blk] * dXa[blk] * Gi[blk].transpose();
      const MatX dzs = G[blk].transpose() * dZa[blk] * G[blk];
      MatX prod = dxs * dzs;
      MatX rhs_b = -0.5 * (prod + prod.transpose());
      rhs_b.diagonal() -= vdiag[blk].cwiseProduct(vdiag[blk]);
      rhs_b.diagonal().array() += sigma * mu;
      const int dblk = prob.dims[blk];
      MatX S(dblk, dblk);
      for (int r = 0; r < dblk; ++r)
        for (int c = 0; c < dblk; ++c)
          S(r, c) = 2.0 * rhs_b(r, c) / (vdiag[blk](r) + vdiag[blk](c));
      Rc[blk].noalias() = G[blk] * S * G[blk].transpose();
      Rc[blk] = 0.5 * (Rc[blk] + Rc[blk].transpose()).eval();
    }
    VecX dy, df;
    direction(Rc, dy, df, dZ, dX);

    double sp = std::numeric_limits<double>::infinity();
    double sd = std::numeric_limits<double>::infinity();
    for (int blk = 0; blk < nblk; ++blk) {
      sp = std::min(sp, detail::max_step(lltX[blk], dX[blk]));
      sd = std::min(sd, detail::max_step(lltZ[blk], dZ[blk]));
    }
    const double alpha_p = std::min(1.0, opt.tau * sp);
    const double alpha_d = std::min(1.0, opt.tau * sd);
    if (!std::isfinite(alpha_p) || !std::isfinite(alpha_d)) {
      res.status = Status::numerical_failure;
      return res;
    }

    for (int blk = 0; blk < nblk; ++blk) {
      X[blk] += alpha_p * dX[blk];
      Z[blk] += alpha_d * dZ[blk];
      X[blk] = 0.5 * (X[blk] + X[blk].transpose()).eval();
      Z[blk] = 0.5 * (Z[blk] + Z[blk].transpose()).eval();
    }
    y += alpha_d * dy;
    if (nf > 0) f += alpha_p * df;
  }

  return res;
}

}  // namespace irsbeam::sdpcore
