#pragma once

// Closed-form constrained least-squares solvers for min ||X2 - A X1||_F:
//  - unitary A (orthogonal Procrustes, used by piDMD),
//  - Hermitian A (Hermitian Procrustes, used by the CN/SI schemes).

#include <algorithm>
#include <limits>

#include "oscidmd/errors.hpp"
#include "oscidmd/linalg.hpp"

namespace oscidmd {

struct UnitaryProcrustesResult {
  ComplexMatrix L;
  Index rank = 0;       // numerical rank of X2 X1^*
  bool unique = true;   // false when X2 X1^* is rank deficient
};

/// Hermitian core in the left singular basis of X1: A = U H U^*.
struct HermitianProcrustesSolution {
  ComplexMatrix U;     // n x n (full) or n x r (truncated)
  ComplexMatrix H;     // Hermitian, n x n or r x r
  RealVector sigma;    // singular values of X1 matching the columns of U
  Index rank = 0;      // number of nonzero entries of sigma
  bool truncated = false;
};

namespace detail {

inline void require_same_shape(const ComplexMatrix& X1, const ComplexMatrix& X2, const char* who) {
  require(X1.rows() == X2.rows() && X1.cols() == X2.cols(), std::string(who) + ": X1 and X2 must have the same shape");
  require(X1.allFinite() && X2.allFinite(), std::string(who) + ": non-finite input");
}

/// Fills H_ij = (s_i conj(C_ji) + s_j C_ij) / (s_i^2 + s_j^2), zero when the
/// denominator vanishes; H is Hermitian by construction.
inline ComplexMatrix hermitian_core(const ComplexMatrix& C, const RealVector& s) {
  const Index n = C.rows();
  ComplexMatrix H = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double den = s(i) * s(i) + s(j) * s(j);
      if (den == 0.0) continue;
      if (i == j) {
        H(i, i) = Complex(C(i, i).real() / s(i), 0.0);
      } else {
        const Complex hij = (s(i) * std::conj(C(j, i)) + s(j) * C(i, j)) / den;
        H(i, j) = hij;
        H(j, i) = std::conj(hij);
      }
    }
  }
  return H;
}

}  // namespace detail

/// L = U V^* from the SVD of X2 X1^*. On the null space of X2 X1^* the
/// completion maps the right null basis onto the left one by the polar factor
/// of their overlap, so L acts as the identity wherever the two coincide.
inline UnitaryProcrustesResult solve_unitary(const ComplexMatrix& X1, const ComplexMatrix& X2) {
  detail::require_same_shape(X1, X2, "solve_unitary");
  const Index n = X1.rows();
  UnitaryProcrustesResult out;
  if (n == 0) return out;

  const ComplexMatrix M = X2 * X1.adjoint();
  Eigen::BDCSVD<ComplexMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * (s.size() ? s(0) : 0.0);
  Index k = 0;
  while (k < n && s(k) > cutoff) ++k;
  out.rank = k;
  out.unique = (k == n);

  const ComplexMatrix& U = svd.matrixU();
  const ComplexMatrix& V = svd.matrixV();
  out.L = U.leftCols(k) * V.leftCols(k).adjoint();
  if (k < n) {
    const Index d = n - k;
    const ComplexMatrix overlap = V.rightCols(d).adjoint() * U.rightCols(d);
    Eigen::BDCSVD<ComplexMatrix> polar(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexMatrix Q = polar.matrixV() * polar.matrixU().adjoint();
    out.L += U.rightCols(d) * Q * V.rightCols(d).adjoint();
  }
  return out;
}

/// Hermitian Procrustes solution. tol == 0 gives the full n x n core
/// (requires m <= n); tol > 0 truncates to the numerical rank of X1 and
/// returns the leading r x r block of the core.
inline HermitianProcrustesSolution solve_hermitian(const ComplexMatrix& X1, const ComplexMatrix& X2,
                                                   double tol = kDefaultTol) {
  detail::require_same_shape(X1, X2, "solve_hermitian");
  detail::require(tol >= 0.0, "solve_hermitian: tol must be nonnegative");
  const Index n = X1.rows();
  const Index m = X1.cols();
  HermitianProcrustesSolution out;

  if (tol > 0.0) {
    TruncatedSvd svd = truncated_svd(X1, tol);
    const ComplexMatrix C = svd.U.adjoint() * X2 * svd.V;
    out.H = detail::hermitian_core(C, svd.sigma);
    out.U = std::move(svd.U);
    out.sigma = std::move(svd.sigma);
    out.rank = svd.rank;
    out.truncated = true;
    return out;
  }

  detail::require(m <= n, "solve_hermitian: full solve requires m <= n");
  Eigen::BDCSVD<ComplexMatrix> svd(X1, Eigen::ComputeFullU | Eigen::ComputeThinV);
  RealVector s = RealVector::Zero(n);
  s.head(svd.singularValues().size()) = svd.singularValues();
  // Singular values at roundoff level are exact zeros of the rank-deficient
  // data; keeping them would divide roundoff by roundoff in the core.
  const double floor = static_cast<double>(std::max(n, m)) * std::numeric_limits<double>::epsilon() * (n ? s(0) : 0.0);
  for (Index i = 0; i < n; ++i)
    if (s(i) <= floor) s(i) = 0.0;

  ComplexMatrix C = ComplexMatrix::Zero(n, n);
  C.leftCols(m) = svd.matrixU().adjoint() * X2 * svd.matrixV();
  out.H = detail::hermitian_core(C, s);
  out.U = svd.matrixU();
  out.rank = (s.array() > 0.0).count();
  out.sigma = std::move(s);
  out.truncated = false;
  return out;
}

/// A = U H U^* for an untruncated solution.
inline ComplexMatrix assemble_full(const HermitianProcrustesSolution& sol) {
  detail::require(!sol.truncated, "assemble_full: solution is truncated; the full operator is not recoverable");
  detail::require(sol.U.cols() == sol.H.rows() && sol.H.rows() == sol.H.cols(), "assemble_full: inconsistent factors");
  const ComplexMatrix A = sol.U * sol.H * sol.U.adjoint();
  return (A + A.adjoint()) * 0.5;
}

}  // namespace oscidmd
