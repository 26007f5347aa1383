#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "dklm/sym_matrix.hpp"

namespace dklm {

/// Full spectrum of a symmetric matrix. Eigenvalues ascending, column i of
/// `vectors` paired with `values[i]`; vectors orthonormal.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

/// Full symmetric eigendecomposition, eigenvalues in ascending order.
inline EigenPairs sym_eig(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success) {
    throw InvalidInputError("sym_eig: eigensolver failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

// Locate the first non-positive pivot of an unblocked Cholesky. Only called
// on matrices Eigen's LLT already rejected.
inline Index find_failing_pivot(const Matrix& a) {
  const Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return j;
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return n - 1;
}

}  // namespace detail

/// Cholesky solve A X = B for symmetric positive definite A.
inline Matrix solve_spd(const SymMatrix& a, const Matrix& b) {
  if (a.n() != b.rows()) {
    throw InvalidInputError("solve_spd: dimension mismatch");
  }
  require_finite(b, "solve_spd rhs");
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    Index p = detail::find_failing_pivot(a.mat());
    throw SingularityError(
        "solve_spd: matrix not positive definite, pivot " + std::to_string(p) +
            " is non-positive",
        p);
  }
  return llt.solve(b);
}

namespace detail {

// Shift-invert subspace iteration for the low end of a positive
// semidefinite spectrum. Returns true and fills (values, vectors) on
// convergence; on failure the best Ritz estimates are still written so
// callers can choose between a dense fallback and the estimate.
inline bool smallest_eigs_shift_invert(const Matrix& m, Index k, Vector& values,
                                       Matrix& vectors, int max_iter = 300) {
  const Index n = m.rows();
  const Index p = std::min(n, k + std::min<Index>(8, n - k));
  const double scale = std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
  const double sigma = 1e-6 * scale;

  Eigen::LLT<Matrix> llt(m + sigma * Matrix::Identity(n, n));
  if (llt.info() != Eigen::Success) return false;

  Matrix v = Matrix::Identity(n, p);
  Vector ritz = Vector::Zero(p);
  const double tol = 1e-11 * scale;
  bool have_estimate = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    v = llt.solve(v);
    Eigen::HouseholderQR<Matrix> qr(v);
    v = qr.householderQ() * Matrix::Identity(n, p);
    Matrix mv = m * v;
    Eigen::SelfAdjointEigenSolver<Matrix> small(v.transpose() * mv);
    if (small.info() != Eigen::Success) return false;
    v = v * small.eigenvectors();
    ritz = small.eigenvalues();
    values = ritz.head(k);
    vectors = v.leftCols(k);
    have_estimate = true;
    mv = m * v.leftCols(k);
    double resid = (mv - v.leftCols(k) * ritz.head(k).asDiagonal()).norm();
    if (resid <= tol * std::sqrt(double(k))) return true;
  }
  return have_estimate && false;
}

}  // namespace detail

/// k smallest eigenpairs of a symmetric positive semidefinite matrix.
/// Small problems use the dense solver; larger ones a shift-invert
/// subspace iteration with a dense fallback. Ties at the subspace
/// boundary resolve to the solver's stable ascending order.
inline EigenPairs smallest_eigs_psd(const SymMatrix& m, Index k,
                                    Index dense_threshold = 256) {
  const Index n = m.n();
  if (k < 1 || k > n) {
    throw ParameterError("smallest_eigs_psd: k must be in [1, n]");
  }
  if (n <= dense_threshold || 3 * k >= n) {
    EigenPairs full = sym_eig(m);
    return {full.values.head(k), full.vectors.leftCols(k)};
  }
  Vector values;
  Matrix vectors;
  if (detail::smallest_eigs_shift_invert(m.mat(), k, values, vectors)) {
    return {values, vectors};
  }
  EigenPairs full = sym_eig(m);
  return {full.values.head(k), full.vectors.leftCols(k)};
}

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const SymMatrix& m, Index dense_threshold = 600) {
  if (m.n() <= dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw InvalidInputError("min_eigenvalue: eigensolver failed");
    }
    return es.eigenvalues()(0);
  }
  // Large matrices here are kernels or Laplacians, nonnegative up to
  // roundoff, so the PSD shift-invert path applies.
  return smallest_eigs_psd(m, 1, 0).values(0);
}

}  // namespace dklm
