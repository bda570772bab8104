#pragma once

// Dense complex linear-algebra kernels with the truncation and ordering
// conventions shared by every DMD variant in this library.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <numbers>

#include "oscidmd/errors.hpp"

namespace oscidmd {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative singular-value cutoff used when the caller supplies none.
inline constexpr double kDefaultTol = 1e-6;

/// Leading singular triplets of a matrix, r = #{i : sigma_i > tol * sigma_1}.
struct TruncatedSvd {
  ComplexMatrix U;   // n x r, orthonormal columns
  RealVector sigma;  // r values, non-increasing, all > tol * sigma(0)
  ComplexMatrix V;   // m x r, orthonormal columns
  Index rank = 0;
  double tol = kDefaultTol;
};

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
struct HermitianEig {
  ComplexMatrix W;
  RealVector lambda;
};

struct LeastSquaresResult {
  ComplexVector x;
  Index rank = 0;
  bool rank_deficient = false;  // warning channel: a truncated pseudoinverse was used
};

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

/// Numerical rank with the relative cutoff `tol` on a descending spectrum.
inline Index numerical_rank(const RealVector& sigma, double tol) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
  const double cutoff = tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cutoff) ++r;
  return r;
}

inline TruncatedSvd truncated_svd(const ComplexMatrix& M, double tol = kDefaultTol) {
  detail::require(tol >= 0.0, "truncated_svd: tol must be nonnegative");
  detail::require(all_finite(M), "truncated_svd: input contains non-finite entries");

  TruncatedSvd out;
  out.tol = tol;
  if (M.size() == 0) {
    out.U.resize(M.rows(), 0);
    out.V.resize(M.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<ComplexMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const Index r = numerical_rank(s, tol);
  out.rank = r;
  out.sigma = s.head(r);
  out.U = svd.matrixU().leftCols(r);
  out.V = svd.matrixV().leftCols(r);
  return out;
}

/// Factorizes (H + H^*)/2. Rejects inputs whose anti-Hermitian part exceeds
/// 1e-10 of the Frobenius norm.
inline HermitianEig hermitian_eig(const ComplexMatrix& H) {
  detail::require(H.rows() == H.cols(), "hermitian_eig: matrix must be square");
  detail::require(all_finite(H), "hermitian_eig: input contains non-finite entries");
  const Index n = H.rows();
  const double scale = H.norm();
  const double skew = (H - H.adjoint()).norm();
  detail::require(skew <= 1e-10 * scale, "hermitian_eig: input is not Hermitian");

  HermitianEig out;
  if (scale == 0.0) {
    out.W = ComplexMatrix::Identity(n, n);
    out.lambda = RealVector::Zero(n);
    return out;
  }
  const ComplexMatrix sym = (H + H.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  if (eig.info() != Eigen::Success) throw DegenerateDataError("hermitian_eig: eigensolver did not converge");
  // Eigen returns ascending order.
  out.lambda = eig.eigenvalues().reverse();
  out.W = eig.eigenvectors().rowwise().reverse();
  return out;
}

/// Minimal-norm least-squares solution of Phi * x = y via a truncated
/// pseudoinverse (cutoff 1e-12 * sigma_1).
inline LeastSquaresResult least_squares_apply(const ComplexMatrix& Phi, const ComplexVector& y) {
  detail::require(Phi.rows() == y.size(), "least_squares_apply: dimension mismatch");
  detail::require(all_finite(Phi) && y.allFinite(), "least_squares_apply: non-finite input");
  LeastSquaresResult out;
  out.x = ComplexVector::Zero(Phi.cols());
  if (Phi.cols() == 0) return out;

  Eigen::BDCSVD<ComplexMatrix> svd(Phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const Index r = numerical_rank(s, 1e-12);
  out.rank = r;
  out.rank_deficient = r < std::min(Phi.rows(), Phi.cols());
  if (r == 0) return out;
  const ComplexVector coeff = (svd.matrixU().leftCols(r).adjoint() * y).cwiseQuotient(s.head(r).cast<Complex>());
  out.x = svd.matrixV().leftCols(r) * coeff;
  return out;
}

/// Principal logarithm with arguments in (-pi, pi]; the negative real axis
/// maps to +pi regardless of the sign of a zero imaginary part.
inline Complex principal_log(Complex z) {
  double phase = std::arg(z);
  if (z.imag() == 0.0 && z.real() < 0.0) phase = std::numbers::pi;
  return {std::log(std::abs(z)), phase};
}

}  // namespace oscidmd
