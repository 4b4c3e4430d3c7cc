#ifndef SPINTAIL_LINALG_HPP
#define SPINTAIL_LINALG_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "spintail/core.hpp"

namespace spintail {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // column i pairs with values(i)
};

/// Full eigensystem of a Hermitian matrix via LAPACK zheevd.
/// Output order (ascending values) and the per-column phase are whatever
/// LAPACK produces; both are deterministic for identical input bytes.
inline Eigensystem hermitian_eigensystem(const Matrix& H) {
  const auto n = static_cast<lapack_int>(H.rows());
  if (H.cols() != H.rows()) throw ValidationError("eigensystem: matrix not square");
  Eigensystem es;
  es.vectors = H;  // overwritten with eigenvectors
  es.values.resize(n);
  if (n == 0) return es;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(es.vectors.data()), n,
      es.values.data());
  if (info != 0) {
    throw ValidationError("zheevd failed with info=" + std::to_string(info));
  }
  return es;
}

/// Eigenvalues only (cheaper).
inline RealVector hermitian_eigenvalues(const Matrix& H) {
  const auto n = static_cast<lapack_int>(H.rows());
  if (H.cols() != H.rows()) throw ValidationError("eigenvalues: matrix not square");
  Matrix work = H;
  RealVector values(n);
  if (n == 0) return values;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'N', 'L', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n, values.data());
  if (info != 0) {
    throw ValidationError("zheevd failed with info=" + std::to_string(info));
  }
  return values;
}

/// Max entrywise deviation from H = H^dagger.
inline double hermitian_deviation(const Matrix& H) {
  return (H - H.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_exactly_diagonal(const Matrix& H) {
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
      if (i != j && H(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

/// Operator norm of a Hermitian matrix.
inline double hermitian_norm(const Matrix& H) {
  if (H.rows() == 0) return 0.0;
  const RealVector ev = hermitian_eigenvalues(H);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace spintail

#endif  // SPINTAIL_LINALG_HPP
