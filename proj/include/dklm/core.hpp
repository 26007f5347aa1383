#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dklm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input data violates a precondition (non-finite entries, shape mismatch).
struct InvalidInputError : Error {
  using Error::Error;
};

/// A scalar parameter is outside its admissible range.
struct ParameterError : Error {
  using Error::Error;
};

/// A factorization found a non-positive pivot; `pivot` is its index.
struct SingularityError : Error {
  Index pivot;
  SingularityError(const std::string& msg, Index p) : Error(msg), pivot(p) {}
};

/// File parsing or serialization failure.
struct IoError : Error {
  using Error::Error;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInputError(std::string(what) + ": non-finite entries rejected");
  }
}

}  // namespace dklm
