#pragma once

#include <vector>

#include "dklm/kernel.hpp"

namespace dklm {

/// Weights and stopping rules for the alternating minimization.
struct SolverConfig {
  double alpha = 2.0;  ///< local-structure weight
  double beta = 10.0;  ///< relaxation weight
  double gamma = 1.0;  ///< block-diagonal weight
  Index k = 2;         ///< target block count
  int max_iters = 300;
  double tol = 1e-6;

  void validate(Index n) const {
    if (alpha <= 0.0 || beta <= 0.0 || gamma <= 0.0) {
      throw ParameterError("SolverConfig: alpha, beta, gamma must be > 0");
    }
    if (k < 1 || k > n) {
      throw ParameterError("SolverConfig: k must lie in [1, N]");
    }
    if (tol <= 0.0) throw ParameterError("SolverConfig: tol must be > 0");
    if (max_iters < 1) throw ParameterError("SolverConfig: max_iters must be >= 1");
  }
};

/// Per-iteration trace of the alternating minimization.
struct IterationRecord {
  double objective = 0.0;
  double z_delta = 0.0;
  double c_delta = 0.0;
};

/// Solver result: unconstrained representation Z, projected relaxation C,
/// spectral projector S, and the per-iteration objective history.
struct SolverState {
  Matrix z;
  SelfRepMatrix c;
  SymMatrix s;
  std::vector<IterationRecord> history;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline Matrix laplacian_of(const Matrix& c) {
  return Matrix(c.rowwise().sum().asDiagonal()) - c;
}

}  // namespace detail

/// Sum of the k smallest eigenvalues of Diag(C 1) - C; zero exactly when C
/// splits into at least k connected blocks.
inline double block_diag_norm(const SymMatrix& c, Index k) {
  if (k < 1 || k > c.n()) {
    throw ParameterError("block_diag_norm: k must lie in [1, N]");
  }
  EigenPairs low = smallest_eigs_psd(SymMatrix(detail::laplacian_of(c.mat())), k);
  return low.values.sum();
}

/// Exact minimizer of the Z subproblem: Z = (K + beta I)^{-1}(alpha K + beta C).
inline Matrix update_z(const KernelMatrix& kernel, const Matrix& c, double alpha,
                       double beta) {
  if (beta <= 0.0) throw ParameterError("update_z: beta must be > 0");
  const Index n = kernel.n();
  SymMatrix lhs(kernel.mat() + beta * Matrix::Identity(n, n));
  return solve_spd(lhs, alpha * kernel.mat() + beta * c);
}

/// Rank-k spectral projector S = U U^T onto the k smallest eigenvectors of
/// Diag(C 1) - C.
inline SymMatrix update_s(const SelfRepMatrix& c, Index k) {
  if (k < 1 || k > c.n()) throw ParameterError("update_s: k must lie in [1, N]");
  EigenPairs low = smallest_eigs_psd(SymMatrix(detail::laplacian_of(c.mat())), k);
  return SymMatrix(low.vectors * low.vectors.transpose());
}

/// Euclidean projection step for C: with A = Z - (gamma/beta)(diag(S)1^T - S)
/// and its diagonal removed, C = [(A_hat + A_hat^T)/2]_+.
inline SelfRepMatrix update_c(const Matrix& z, const SymMatrix& s, double gamma,
                              double beta) {
  if (beta <= 0.0) throw ParameterError("update_c: beta must be > 0");
  const Index n = z.rows();
  Matrix a = z - (gamma / beta) *
                     (s.mat().diagonal() * Matrix::Ones(1, n) - s.mat());
  a.diagonal().setZero();
  Matrix c = (0.5 * (a + a.transpose())).cwiseMax(0.0);
  c.diagonal().setZero();
  return SelfRepMatrix(std::move(c));
}

/// Objective of the relaxed problem:
///   1/2 Tr(K + Z^T K Z) - alpha Tr(K Z) + beta/2 ||Z - C||^2
///   + gamma <Diag(C 1) - C, S>.
inline double objective(const KernelMatrix& kernel, const Matrix& z,
                        const Matrix& c, const SymMatrix& s,
                        const SolverConfig& cfg) {
  Matrix kz = kernel.mat() * z;
  double fit = 0.5 * (kernel.mat().trace() + z.cwiseProduct(kz).sum());
  double local = cfg.alpha * kz.trace();
  double relax = 0.5 * cfg.beta * (z - c).squaredNorm();
  Matrix lc = detail::laplacian_of(c);
  double bdr = cfg.gamma * lc.cwiseProduct(s.mat()).sum();
  return fit - local + relax + bdr;
}

/// Alternating minimization for the relaxed objective with closed-form
/// updates of Z, S and C from Z = C = 0. Stops when both iterate changes
/// fall below tol in max-entry norm, or at max_iters (state flagged, no
/// exception). The recorded objective is exact at each iterate; monotone
/// non-increase follows from each update solving its convex subproblem.
inline SolverState solve_dklm(const KernelMatrix& kernel, const SolverConfig& cfg) {
  const Index n = kernel.n();
  cfg.validate(n);

  Eigen::LLT<Matrix> llt(kernel.mat() + cfg.beta * Matrix::Identity(n, n));
  if (llt.info() != Eigen::Success) {
    Index p = detail::find_failing_pivot(kernel.mat() +
                                         cfg.beta * Matrix::Identity(n, n));
    throw SingularityError(
        "solve_dklm: K + beta I not positive definite, pivot " +
            std::to_string(p),
        p);
  }
  // The factor is reused across every iteration as an explicit inverse so
  // the per-iteration solve is a single symmetric GEMM.
  Matrix inv = llt.solve(Matrix::Identity(n, n));
  inv = 0.5 * (inv + inv.transpose());

  const Matrix alpha_k = cfg.alpha * kernel.mat();
  const double trace_k = kernel.mat().trace();
  Matrix z_base = inv * alpha_k;
  Matrix z = Matrix::Zero(n, n);
  Matrix c = Matrix::Zero(n, n);
  Matrix s = Matrix::Zero(n, n);
  SolverState state;

  for (int it = 0; it < cfg.max_iters; ++it) {
    Matrix z_prev = z;
    Matrix c_prev = c;

    z = z_base;
    z.noalias() += cfg.beta * (inv * c);
    Matrix kz = alpha_k + cfg.beta * c - cfg.beta * z;  // (K + beta I) Z = alpha K + beta C

    // <L_C, S> is constant over feasible S when C == 0; the affinity of the
    // fresh Z then picks the projector, keeping the choice deterministic and
    // permutation-equivariant.
    Matrix lap;
    if (c.cwiseAbs().maxCoeff() == 0.0) {
      lap = detail::laplacian_of(affinity_from_z(z).mat());
    } else {
      lap = detail::laplacian_of(c);
    }
    EigenPairs low = smallest_eigs_psd(SymMatrix(lap), cfg.k);
    s.noalias() = low.vectors * low.vectors.transpose();

    Matrix a = z - (cfg.gamma / cfg.beta) *
                       (s.diagonal() * Matrix::Ones(1, n) - s);
    a.diagonal().setZero();
    c = (0.5 * (a + a.transpose())).cwiseMax(0.0);
    c.diagonal().setZero();

    IterationRecord rec;
    rec.z_delta = (z - z_prev).cwiseAbs().maxCoeff();
    rec.c_delta = (c - c_prev).cwiseAbs().maxCoeff();
    Vector c_deg = c.rowwise().sum();
    double bdr = c_deg.dot(s.diagonal()) - c.cwiseProduct(s).sum();
    rec.objective = 0.5 * (trace_k + z.cwiseProduct(kz).sum()) -
                    cfg.alpha * kz.trace() +
                    0.5 * cfg.beta * (z - c).squaredNorm() + cfg.gamma * bdr;
    state.history.push_back(rec);
    state.iterations = it + 1;

    if (std::max(rec.z_delta, rec.c_delta) < cfg.tol) {
      state.converged = true;
      break;
    }
  }

  state.z = std::move(z);
  state.c = SelfRepMatrix(std::move(c));
  state.s = SymMatrix(std::move(s));
  return state;
}

}  // namespace dklm
