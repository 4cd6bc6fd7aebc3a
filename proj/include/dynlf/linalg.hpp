#pragma once

#include <utility>

#include "dynlf/errors.hpp"
#include "dynlf/types.hpp"

namespace dynlf::linalg {

/// Symmetry check tolerance, relative to max(1, largest |entry|).
inline constexpr double kSymmetryTol = 1e-10;

/// Smallest admissible Cholesky pivot. Absolute: covariances may shrink
/// toward zero in the exact-observation limit and must still factor.
inline constexpr double kMinPivot = 1e-14;

/// Lower-triangular factor L with A = L L^T.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {}
  const Matrix& lower() const { return lower_; }

  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;

 private:
  Matrix lower_;
};

CholeskyFactor cholesky(const Matrix& a);

/// X with A X = B for symmetric positive-definite A, via Cholesky.
Matrix solve_spd(const Matrix& a, const Matrix& rhs);
Vector solve_spd(const Matrix& a, const Vector& rhs);

/// (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

}  // namespace dynlf::linalg
