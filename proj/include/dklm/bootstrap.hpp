#pragma once

#include "dklm/numerics.hpp"

namespace dklm {

/// N x N self-representation coefficients. Diagonal is exactly zero; the
/// bootstrap additionally clamps entries to be nonnegative.
class SelfRepMatrix {
 public:
  SelfRepMatrix() = default;

  explicit SelfRepMatrix(Matrix z) : z_(std::move(z)) {
    if (z_.rows() != z_.cols()) {
      throw InvalidInputError("SelfRepMatrix: matrix must be square");
    }
    require_finite(z_, "SelfRepMatrix");
    z_.diagonal().setZero();
  }

  Index n() const { return z_.rows(); }
  const Matrix& mat() const { return z_; }
  double operator()(Index i, Index j) const { return z_(i, j); }

 private:
  Matrix z_;
};

/// Symmetrically degree-normalized affinity G with its cached maximum entry.
struct NormalizedAffinity {
  SymMatrix g;
  double max_entry = 0.0;
};

/// Least-squares self-representation: solves the ridge system
/// (X^T X + gamma I) Z = X^T X, then zeroes the diagonal and clamps
/// negative coefficients to zero.
inline SelfRepMatrix lsr_selfrep(const Matrix& x, double gamma_boot) {
  if (gamma_boot <= 0.0) {
    throw ParameterError("lsr_selfrep: gamma_boot must be > 0");
  }
  if (x.cols() < 2) {
    throw InvalidInputError("lsr_selfrep: need at least 2 data points");
  }
  require_finite(x, "lsr_selfrep data");
  const Index n = x.cols();
  Matrix gram = x.transpose() * x;
  SymMatrix a(gram + gamma_boot * Matrix::Identity(n, n));
  Matrix z = solve_spd(a, gram);
  z.diagonal().setZero();
  z = z.cwiseMax(0.0);
  return SelfRepMatrix(std::move(z));
}

/// Ridge solution before the constraint projection; test hook for oracle
/// comparison against the explicit inverse.
inline Matrix lsr_unconstrained(const Matrix& x, double gamma_boot) {
  if (gamma_boot <= 0.0) {
    throw ParameterError("lsr_selfrep: gamma_boot must be > 0");
  }
  require_finite(x, "lsr_selfrep data");
  const Index n = x.cols();
  Matrix gram = x.transpose() * x;
  SymMatrix a(gram + gamma_boot * Matrix::Identity(n, n));
  return solve_spd(a, gram);
}

/// W = (Z^T + Z)/2.
inline SymMatrix build_affinity(const SelfRepMatrix& z) {
  return SymMatrix(z.mat());
}

/// G(i,j) = W(i,j) / sqrt((d_i + eps)(d_j + eps)) with d the row sums of W.
/// eps guards zero-degree rows.
inline NormalizedAffinity normalize_degree(const SymMatrix& w, double eps = 1e-12) {
  const Index n = w.n();
  Vector d = w.mat().rowwise().sum();
  Vector inv_sqrt(n);
  for (Index i = 0; i < n; ++i) inv_sqrt(i) = 1.0 / std::sqrt(d(i) + eps);
  Matrix g = inv_sqrt.asDiagonal() * w.mat() * inv_sqrt.asDiagonal();
  NormalizedAffinity out{SymMatrix(g), 0.0};
  out.max_entry = n > 0 ? out.g.mat().maxCoeff() : 0.0;
  return out;
}

}  // namespace dklm
