#pragma once

// Fitting and prediction for classical DMD, piDMD (unitary operator) and the
// structure-preserving Crank-Nicolson / semi-implicit DMD schemes, which learn
// a Hermitian generator A and advance states by its Cayley transform.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "oscidmd/errors.hpp"
#include "oscidmd/linalg.hpp"
#include "oscidmd/procrustes.hpp"
#include "oscidmd/spectral_solver.hpp"

namespace oscidmd {

/// Tag values double as the scheme byte of the model file format.
enum class Method : std::uint8_t {
  kClassical = 0,
  kPiDmd = 1,
  kCrankNicolson = 2,
  kSemiImplicit = 3,
};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::kClassical: return "classical";
    case Method::kPiDmd: return "pidmd";
    case Method::kCrankNicolson: return "cn";
    case Method::kSemiImplicit: return "si";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "classical" || s == "dmd") return Method::kClassical;
  if (s == "pidmd") return Method::kPiDmd;
  if (s == "cn" || s == "cn-dmd") return Method::kCrankNicolson;
  if (s == "si" || s == "si-dmd") return Method::kSemiImplicit;
  return std::nullopt;
}

inline bool is_structured(Method m) {
  return m == Method::kCrankNicolson || m == Method::kSemiImplicit;
}

struct ClassicalDmdModel {
  ComplexMatrix modes;        // Phi, n x r
  ComplexVector eigenvalues;  // lambda, r
  ComplexVector amplitudes;   // b = pinv(Phi) x0
  double tau = 1.0;
  ComplexVector frequencies;  // omega = -i ln(lambda) / tau; NaN where lambda == 0
  bool amplitudes_rank_deficient = false;

  Index rank() const { return modes.cols(); }
  bool has_undefined_frequency() const { return !frequencies.allFinite(); }
};

struct UnitaryModel {
  ComplexMatrix L;
  double tau = 1.0;
  bool unique = true;
};

/// Reduced factorization A ~ U diag(lambda) U^* with Cayley factors d.
struct ReducedHermitianModel {
  ComplexMatrix basis;        // U, n x r, orthonormal columns
  RealVector eigenvalues;     // lambda, descending
  ComplexVector factors;      // d, unit modulus
  double tau = 1.0;
  Method scheme = Method::kCrankNicolson;

  Index rank() const { return basis.cols(); }
  Index dim() const { return basis.rows(); }
};

struct AugmentedPair {
  ComplexMatrix X1;
  ComplexMatrix X2;
};

/// Elementwise d^k = exp(k log d) with the principal logarithm. Entries on the
/// unit circle (within 1e-12) are advanced by phase only, so |d^k| stays 1.
inline ComplexVector stable_power(const ComplexVector& d, Index k) {
  detail::require(k >= 0, "stable_power: exponent must be nonnegative");
  ComplexVector out(d.size());
  const double kk = static_cast<double>(k);
  for (Index j = 0; j < d.size(); ++j) {
    if (k == 0) {
      out(j) = 1.0;
      continue;
    }
    const double mod = std::abs(d(j));
    if (mod == 0.0) {
      out(j) = 0.0;
    } else if (std::abs(mod - 1.0) <= 1e-12) {
      out(j) = std::polar(1.0, kk * principal_log(d(j)).imag());
    } else {
      out(j) = std::exp(kk * principal_log(d(j)));
    }
  }
  return out;
}

/// CN: (1 - i tau l/2)/(1 + i tau l/2); SI: (1 - i tau l)/(1 + i tau l).
/// Evaluated as exp(-2i atan(c)), which is the same number on the unit circle.
inline ComplexVector spectral_factors(const RealVector& lambda, double tau, Method scheme) {
  detail::require(is_structured(scheme), "spectral_factors: scheme must be cn or si");
  const double scale = scheme == Method::kCrankNicolson ? tau / 2.0 : tau;
  ComplexVector d(lambda.size());
  for (Index j = 0; j < lambda.size(); ++j) d(j) = std::polar(1.0, -2.0 * std::atan(scale * lambda(j)));
  return d;
}

// ---------------------------------------------------------------- classical

inline ClassicalDmdModel fit_classical(const SnapshotMatrix& X, double tol = kDefaultTol) {
  detail::require(X.snapshots() >= 2, "fit_classical: need at least two snapshots");
  const Index m = X.snapshots() - 1;
  const ComplexMatrix X1 = X.data.leftCols(m);
  const ComplexMatrix X2 = X.data.rightCols(m);

  const TruncatedSvd svd = truncated_svd(X1, tol);
  if (svd.rank == 0) throw DegenerateDataError("fit_classical: degenerate data (numerical rank 0)");
  const Index r = svd.rank;

  const ComplexMatrix B = X2 * svd.V * svd.sigma.cwiseInverse().asDiagonal();
  const ComplexMatrix Lt = svd.U.adjoint() * B;
  Eigen::ComplexEigenSolver<ComplexMatrix> eig(Lt, true);
  if (eig.info() != Eigen::Success) throw DegenerateDataError("fit_classical: eigensolver did not converge");

  std::vector<Index> order(static_cast<size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  const ComplexVector& ev = eig.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(ev(a)), mb = std::abs(ev(b));
    if (ma != mb) return ma > mb;
    return principal_log(ev(a)).imag() < principal_log(ev(b)).imag();
  });

  ClassicalDmdModel model;
  model.tau = X.tau;
  model.eigenvalues.resize(r);
  ComplexMatrix W(r, r);
  for (Index i = 0; i < r; ++i) {
    model.eigenvalues(i) = ev(order[static_cast<size_t>(i)]);
    W.col(i) = eig.eigenvectors().col(order[static_cast<size_t>(i)]);
  }
  model.modes = B * W;
  const LeastSquaresResult ls = least_squares_apply(model.modes, X.data.col(0));
  model.amplitudes = ls.x;
  model.amplitudes_rank_deficient = ls.rank_deficient;

  model.frequencies.resize(r);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Index i = 0; i < r; ++i) {
    const Complex l = model.eigenvalues(i);
    model.frequencies(i) = l == Complex(0.0) ? Complex(nan, nan) : Complex(0.0, -1.0) * principal_log(l) / X.tau;
  }
  return model;
}

inline ComplexVector predict_classical(const ClassicalDmdModel& model, Index k) {
  return model.modes * stable_power(model.eigenvalues, k).cwiseProduct(model.amplitudes);
}

/// Columns k = first .. first+count-1 of Phi Lambda^k b.
inline ComplexMatrix predict_classical_block(const ClassicalDmdModel& model, Index first, Index count) {
  ComplexMatrix Z(model.rank(), count);
  for (Index c = 0; c < count; ++c) Z.col(c) = stable_power(model.eigenvalues, first + c).cwiseProduct(model.amplitudes);
  return model.modes * Z;
}

// -------------------------------------------------------------------- piDMD

inline UnitaryModel fit_pidmd(const SnapshotMatrix& X) {
  detail::require(X.snapshots() >= 2, "fit_pidmd: need at least two snapshots");
  const Index m = X.snapshots() - 1;
  UnitaryProcrustesResult res = solve_unitary(X.data.leftCols(m), X.data.rightCols(m));
  return {std::move(res.L), X.tau, res.unique};
}

/// L^k x0 by repeated multiplication with the full operator.
inline ComplexVector predict_pidmd(const UnitaryModel& model, const ComplexVector& x0, Index k) {
  detail::require(x0.size() == model.L.cols(), "predict_pidmd: dimension mismatch");
  detail::require(k >= 0, "predict_pidmd: k must be nonnegative");
  ComplexVector x = x0;
  for (Index i = 0; i < k; ++i) x = model.L * x;
  return x;
}

/// Columns k = 0..N of the piDMD trajectory.
inline ComplexMatrix predict_pidmd_trajectory(const UnitaryModel& model, const ComplexVector& x0, Index N) {
  detail::require(x0.size() == model.L.cols(), "predict_pidmd: dimension mismatch");
  ComplexMatrix out(x0.size(), N + 1);
  out.col(0) = x0;
  for (Index k = 1; k <= N; ++k) out.col(k).noalias() = model.L * out.col(k - 1);
  return out;
}

// --------------------------------------------------------- structured DMD

/// X1 = [(x_k + x_{k+1})/2], X2 = [i (x_{k+1} - x_k)/tau], k = 0..m-1.
inline AugmentedPair build_cn_matrices(const SnapshotMatrix& X) {
  detail::require(X.snapshots() >= 2, "build_cn_matrices: need at least two snapshots");
  const Index m = X.snapshots() - 1;
  const auto lo = X.data.leftCols(m);
  const auto hi = X.data.rightCols(m);
  return {(lo + hi) * 0.5, (hi - lo) * Complex(0.0, 1.0 / X.tau)};
}

/// X1 = [(x_{k+1} + x_{k-1})/2], X2 = [i (x_{k+1} - x_{k-1})/(2 tau)], k = 1..m-1.
inline AugmentedPair build_si_matrices(const SnapshotMatrix& X) {
  detail::require(X.snapshots() >= 3, "build_si_matrices: need at least three snapshots");
  const Index cols = X.snapshots() - 2;
  const auto lo = X.data.leftCols(cols);
  const auto hi = X.data.rightCols(cols);
  return {(lo + hi) * 0.5, (hi - lo) * Complex(0.0, 0.5 / X.tau)};
}

/// Builds the scheme matrices, solves the truncated Hermitian Procrustes
/// problem, diagonalizes the r x r core and lifts its eigenvectors.
/// tol == 0 keeps every nonzero singular value. Rank-0 data give an r = 0
/// model whose prediction is the identity map.
inline ReducedHermitianModel fit_structured(const SnapshotMatrix& X, Method scheme, double tol = kDefaultTol) {
  detail::require(is_structured(scheme), "fit_structured: scheme must be cn or si");
  const AugmentedPair pair = scheme == Method::kCrankNicolson ? build_cn_matrices(X) : build_si_matrices(X);
  const double t = tol > 0.0 ? tol : std::numeric_limits<double>::min();
  const HermitianProcrustesSolution sol = solve_hermitian(pair.X1, pair.X2, t);

  ReducedHermitianModel model;
  model.tau = X.tau;
  model.scheme = scheme;
  if (sol.rank == 0) {
    model.basis.resize(X.dim(), 0);
    model.eigenvalues.resize(0);
    model.factors.resize(0);
    return model;
  }
  const HermitianEig eig = hermitian_eig(sol.H);
  model.basis = sol.U * eig.W;
  model.eigenvalues = eig.lambda;
  model.factors = spectral_factors(eig.lambda, X.tau, scheme);
  return model;
}

namespace detail {

inline void check_structured_inputs(const ReducedHermitianModel& model, const ComplexVector& x0,
                                    const std::optional<ComplexVector>& x1, Index N) {
  require(N >= 0, "predict: horizon must be nonnegative");
  require(x0.size() == model.dim(), "predict: x0 dimension mismatch");
  if (x1) require(x1->size() == model.dim(), "predict: x1 dimension mismatch");
  if (model.scheme == Method::kSemiImplicit && N % 2 == 1)
    require(x1.has_value(), "predict: semi-implicit prediction at odd steps requires x1");
}

/// Base state and number of factor applications for target index k.
inline std::pair<const ComplexVector*, Index> structured_stream(const ReducedHermitianModel& model,
                                                                const ComplexVector& x0,
                                                                const std::optional<ComplexVector>& x1, Index k) {
  if (model.scheme == Method::kCrankNicolson) return {&x0, k};
  if (k % 2 == 0) return {&x0, k / 2};
  return {&*x1, (k - 1) / 2};
}

}  // namespace detail

/// CN: x_N = U d^N (U^* x0) + (I - U U^*) x0.
/// SI: even N uses x0 with d^{N/2}, odd N uses x1 with d^{(N-1)/2}.
inline ComplexVector predict_structured(const ReducedHermitianModel& model, const ComplexVector& x0,
                                        const std::optional<ComplexVector>& x1, Index N) {
  detail::check_structured_inputs(model, x0, x1, N);
  const auto [base, power] = detail::structured_stream(model, x0, x1, N);
  if (power == 0 || model.rank() == 0) return *base;
  const ComplexVector z = model.basis.adjoint() * *base;
  const ComplexVector zk = stable_power(model.factors, power).cwiseProduct(z);
  return model.basis * (zk - z) + *base;
}

inline ComplexVector predict_structured(const ReducedHermitianModel& model, const ComplexVector& x0, Index N) {
  return predict_structured(model, x0, std::nullopt, N);
}

/// Predictions at k = 1..N as columns of an n x N matrix, computed as
/// U Z + [x_perp, ...] with Z(:, k) = d^k .* z0 (per stream for SI).
inline ComplexMatrix predict_block(const ReducedHermitianModel& model, const ComplexVector& x0,
                                   const std::optional<ComplexVector>& x1, Index N) {
  detail::check_structured_inputs(model, x0, x1, N);
  if (model.scheme == Method::kSemiImplicit && N >= 1)
    detail::require(x1.has_value(), "predict: semi-implicit prediction requires x1");
  const Index n = model.dim();
  const Index r = model.rank();
  ComplexMatrix out(n, N);
  if (N == 0) return out;

  const ComplexVector z0 = model.basis.adjoint() * x0;
  const ComplexVector perp0 = x0 - model.basis * z0;
  ComplexVector z1, perp1;
  if (x1) {
    z1 = model.basis.adjoint() * *x1;
    perp1 = *x1 - model.basis * z1;
  }

  ComplexMatrix Z(r, N);
  for (Index k = 1; k <= N; ++k) {
    const auto [base, power] = detail::structured_stream(model, x0, x1, k);
    const ComplexVector& z = base == &x0 ? z0 : z1;
    Z.col(k - 1) = stable_power(model.factors, power).cwiseProduct(z);
  }
  out.noalias() = model.basis * Z;
  for (Index k = 1; k <= N; ++k) {
    const auto [base, power] = detail::structured_stream(model, x0, x1, k);
    if (power == 0) {
      out.col(k - 1) = *base;
    } else {
      out.col(k - 1) += base == &x0 ? perp0 : perp1;
    }
  }
  return out;
}

/// Same columns as predict_block, each computed independently with
/// predict_structured across `threads` workers. Output does not depend on
/// the thread count.
inline ComplexMatrix predict_parallel(const ReducedHermitianModel& model, const ComplexVector& x0,
                                      const std::optional<ComplexVector>& x1, Index N, unsigned threads = 1) {
  detail::check_structured_inputs(model, x0, x1, N);
  if (model.scheme == Method::kSemiImplicit && N >= 1)
    detail::require(x1.has_value(), "predict: semi-implicit prediction requires x1");
  ComplexMatrix out(model.dim(), N);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<Index>(N, 1))));
  auto work = [&](unsigned w) {
    for (Index k = 1 + w; k <= N; k += threads) out.col(k - 1) = predict_structured(model, x0, x1, k);
  };
  if (threads == 1) {
    work(0);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  pool.clear();
  return out;
}

/// A x through the reduced factorization: U diag(lambda) U^* x.
inline ComplexVector apply_reduced_operator(const ReducedHermitianModel& model, const ComplexVector& x) {
  detail::require(x.size() == model.dim(), "apply_reduced_operator: dimension mismatch");
  if (model.rank() == 0) return ComplexVector::Zero(x.size());
  const ComplexVector z = model.basis.adjoint() * x;
  return model.basis * model.eigenvalues.cast<Complex>().cwiseProduct(z);
}

/// E(x) = x^* A x = sum_j lambda_j |(U^* x)_j|^2.
inline double discretized_energy(const ReducedHermitianModel& model, const ComplexVector& x) {
  detail::require(x.size() == model.dim(), "discretized_energy: dimension mismatch");
  if (model.rank() == 0) return 0.0;
  const ComplexVector z = model.basis.adjoint() * x;
  return (model.eigenvalues.array() * z.array().abs2()).sum();
}

// ------------------------------------------------------ time-delay embedding

struct DelayEmbedding {
  Index depth = 1;
  Index base_dim = 0;

  Index embedded_dim() const { return depth * base_dim; }

  /// Column j of the result stacks x_j, ..., x_{j+depth-1}.
  SnapshotMatrix embed(const SnapshotMatrix& X) const {
    detail::require(depth >= 1, "delay_embed: depth must be >= 1");
    detail::require(X.dim() == base_dim, "delay_embed: base dimension mismatch");
    detail::require(depth <= X.snapshots() - 1, "delay_embed: depth exceeds the number of snapshot transitions");
    const Index cols = X.snapshots() - depth + 1;
    SnapshotMatrix out{ComplexMatrix(embedded_dim(), cols), X.tau, X.grid, X.eps};
    for (Index j = 0; j < cols; ++j)
      for (Index q = 0; q < depth; ++q) out.data.block(q * base_dim, j, base_dim, 1) = X.data.col(j + q);
    return out;
  }

  /// Latest physical state held by an embedded state (its trailing block).
  ComplexVector extract(const ComplexVector& embedded) const {
    detail::require(embedded.size() == embedded_dim(), "delay_embed: embedded dimension mismatch");
    return embedded.tail(base_dim);
  }

  /// Physical trajectory x_0 .. x_{K+depth-2} from embedded states 0..K-1:
  /// leading blocks of the first state, then the trailing block of each.
  ComplexMatrix unembed(const ComplexMatrix& embedded) const {
    detail::require(embedded.rows() == embedded_dim() && embedded.cols() >= 1, "delay_embed: bad embedded trajectory");
    const Index K = embedded.cols();
    ComplexMatrix out(base_dim, K + depth - 1);
    for (Index q = 0; q + 1 < depth; ++q) out.col(q) = embedded.block(q * base_dim, 0, base_dim, 1);
    for (Index k = 0; k < K; ++k) out.col(k + depth - 1) = embedded.block((depth - 1) * base_dim, k, base_dim, 1);
    return out;
  }
};

inline SnapshotMatrix delay_embed(const SnapshotMatrix& X, Index depth) {
  return DelayEmbedding{depth, X.dim()}.embed(X);
}

}  // namespace oscidmd
