#include "dynlf/linalg.hpp"

#include <cmath>
#include <string>

namespace dynlf::linalg {

namespace {

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols())
    fail(Errc::dimension_mismatch, std::string(who) + ": matrix is " + std::to_string(a.rows()) +
                                       "x" + std::to_string(a.cols()) + ", expected square");
}

}  // namespace

Matrix symmetrize(const Matrix& a) {
  require_square(a, "symmetrize");
  return 0.5 * (a + a.transpose());
}

CholeskyFactor cholesky(const Matrix& a) {
  require_square(a, "cholesky");
  const Index n = a.rows();
  if (n > 0) {
    const double scale = a.cwiseAbs().maxCoeff();
    const double tol = kSymmetryTol * std::max(1.0, scale);
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= tol))
      fail(Errc::not_symmetric,
           "cholesky: asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }

  Matrix l = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const double pivot = a(k, k) - l.row(k).head(k).squaredNorm();
    if (!(pivot >= kMinPivot))
      fail(Errc::not_positive_definite,
           "cholesky: pivot " + std::to_string(pivot) + " at index " + std::to_string(k));
    const double diag = std::sqrt(pivot);
    l(k, k) = diag;
    const Index tail = n - k - 1;
    if (tail > 0) {
      l.col(k).tail(tail) =
          (a.col(k).tail(tail) - l.bottomLeftCorner(tail, k) * l.row(k).head(k).transpose()) /
          diag;
    }
  }
  return CholeskyFactor(std::move(l));
}

Vector CholeskyFactor::solve(const Vector& rhs) const {
  if (rhs.size() != lower_.rows())
    fail(Errc::dimension_mismatch, "cholesky solve: rhs length " + std::to_string(rhs.size()) +
                                       " vs order " + std::to_string(lower_.rows()));
  Vector y = lower_.triangularView<Eigen::Lower>().solve(rhs);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::solve(const Matrix& rhs) const {
  if (rhs.rows() != lower_.rows())
    fail(Errc::dimension_mismatch, "cholesky solve: rhs has " + std::to_string(rhs.rows()) +
                                       " rows vs order " + std::to_string(lower_.rows()));
  Matrix y = lower_.triangularView<Eigen::Lower>().solve(rhs);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix solve_spd(const Matrix& a, const Matrix& rhs) {
  if (rhs.rows() != a.rows())
    fail(Errc::dimension_mismatch, "solve_spd: rhs has " + std::to_string(rhs.rows()) +
                                       " rows, matrix has " + std::to_string(a.rows()));
  return cholesky(a).solve(rhs);
}

Vector solve_spd(const Matrix& a, const Vector& rhs) {
  if (rhs.size() != a.rows())
    fail(Errc::dimension_mismatch, "solve_spd: rhs length " + std::to_string(rhs.size()) +
                                       ", matrix has " + std::to_string(a.rows()) + " rows");
  return cholesky(a).solve(rhs);
}

}  // namespace dynlf::linalg
