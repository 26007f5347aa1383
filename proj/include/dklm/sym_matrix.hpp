#pragma once

#include "dklm/core.hpp"

namespace dklm {

/// Dense symmetric matrix. Construction symmetrizes the input as
/// (M + M^T)/2 so the symmetry invariant holds exactly in floating point,
/// and rejects non-finite entries.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& m) {
    if (m.rows() != m.cols()) {
      throw InvalidInputError("SymMatrix: matrix must be square, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    require_finite(m, "SymMatrix");
    m_ = 0.5 * (m + m.transpose());
  }

  Index n() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

}  // namespace dklm
