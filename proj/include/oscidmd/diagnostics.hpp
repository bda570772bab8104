#pragma once

// Noise injection, prediction metrics, training-residual bound checks, the
// toy unitary-data generator and the periodic finite-difference reference
// operator.

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "oscidmd/dmd.hpp"
#include "oscidmd/errors.hpp"
#include "oscidmd/linalg.hpp"
#include "oscidmd/spectral_solver.hpp"

namespace oscidmd {

/// Identifier of the pseudo-random stream, recorded in experiment manifests.
inline constexpr std::string_view kNoiseGenerator = "boost::random::mt19937_64+normal_distribution(ziggurat)";

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Adds eta = (sigma/sqrt 2)(eta1 + i eta2) to every entry, drawing eta1 then
/// eta2 for each entry in column-major order.
inline SnapshotMatrix add_noise(const SnapshotMatrix& X, const NoiseSpec& spec) {
  detail::require(spec.sigma >= 0.0 && std::isfinite(spec.sigma), "add_noise: sigma must be nonnegative");
  SnapshotMatrix out = X;
  if (spec.sigma == 0.0) return out;
  boost::random::mt19937_64 gen(spec.seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double scale = spec.sigma / std::numbers::sqrt2;
  for (Index c = 0; c < out.data.cols(); ++c)
    for (Index r = 0; r < out.data.rows(); ++r) {
      const double re = normal(gen);
      const double im = normal(gen);
      out.data(r, c) += scale * Complex(re, im);
    }
  return out;
}

using EnergyFunctional = std::function<double(const ComplexVector&)>;

/// Per-step error and conservation series. err_k is NaN where the truth
/// column vanishes; such steps are skipped by the summaries.
struct MetricSeries {
  std::vector<double> err;
  std::vector<double> dM;
  std::vector<double> dE;  // empty when no energy functional was supplied
  double e_rel = 0.0;

  Index size() const { return static_cast<Index>(err.size()); }
  bool has_energy() const { return !dE.empty(); }

  double final_err() const {
    for (auto it = err.rbegin(); it != err.rend(); ++it)
      if (!std::isnan(*it)) return *it;
    return std::numeric_limits<double>::quiet_NaN();
  }
  double final_dM() const { return dM.empty() ? 0.0 : dM.back(); }
  double final_dE() const { return dE.empty() ? std::numeric_limits<double>::quiet_NaN() : dE.back(); }
  double max_dM() const {
    double m = 0.0;
    for (double v : dM) m = std::max(m, v);
    return m;
  }
  double max_dE() const {
    double m = 0.0;
    for (double v : dE) m = std::max(m, v);
    return m;
  }
};

inline MetricSeries metrics(const ComplexMatrix& pred, const ComplexMatrix& truth,
                            const EnergyFunctional& energy = {}) {
  detail::require(pred.rows() == truth.rows() && pred.cols() == truth.cols(), "metrics: shape mismatch");
  const Index K = pred.cols();
  MetricSeries out;
  out.err.resize(static_cast<size_t>(K));
  out.dM.resize(static_cast<size_t>(K));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double m0 = K > 0 ? pred.col(0).norm() : 0.0;
  double e0 = 0.0;
  if (energy && K > 0) {
    out.dE.resize(static_cast<size_t>(K));
    e0 = std::abs(energy(pred.col(0)));
  }
  for (Index k = 0; k < K; ++k) {
    const auto kk = static_cast<size_t>(k);
    const double tn = truth.col(k).norm();
    out.err[kk] = tn > 0.0 ? (pred.col(k) - truth.col(k)).norm() / tn : nan;
    out.dM[kk] = m0 > 0.0 ? std::abs(pred.col(k).norm() - m0) / m0 : 0.0;
    if (energy) out.dE[kk] = std::abs(std::abs(energy(pred.col(k))) - e0) / e0;
  }
  const double tf = truth.norm();
  out.e_rel = tf > 0.0 ? (pred - truth).norm() / tf : nan;
  return out;
}

/// Writes `k,err,dM,dE` rows with 17 significant digits.
inline void write_metric_csv(std::ostream& os, const MetricSeries& s) {
  os << "k,err,dM,dE\n";
  char buf[128];
  for (Index k = 0; k < s.size(); ++k) {
    const auto kk = static_cast<size_t>(k);
    const double de = s.has_energy() ? s.dE[kk] : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(k), s.err[kk], s.dM[kk], de);
    os << buf;
  }
}

using OperatorApply = std::function<ComplexVector(const ComplexVector&)>;

/// ||i (x_{k+1} - x_k)/tau - A (x_{k+1} + x_k)/2||_2 for k = 0..m-1.
inline std::vector<double> training_residuals(const SnapshotMatrix& X, const OperatorApply& apply_a) {
  detail::require(X.snapshots() >= 2, "training_residuals: need at least two snapshots");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(X.snapshots() - 1));
  const Complex i_over_tau(0.0, 1.0 / X.tau);
  for (Index k = 0; k + 1 < X.snapshots(); ++k) {
    const ComplexVector lhs = i_over_tau * (X.data.col(k + 1) - X.data.col(k));
    const ComplexVector mid = 0.5 * (X.data.col(k + 1) + X.data.col(k));
    out.push_back((lhs - apply_a(mid)).norm());
  }
  return out;
}

struct TrainingBoundReport {
  bool holds = true;
  std::vector<double> error;   // ||e_{k+1}||, k = 0..m-1
  std::vector<double> bound;   // tau * sum_{i<=k} ||l_i||
  double slack = 0.0;
  Index first_violation = -1;  // k of the first failing step
  double worst_margin = 0.0;   // max over k of error - bound - slack (<= 0 when it holds)
};

/// Checks ||e_{k+1}|| <= tau sum_{i<=k} ||l_i(A)|| + 1e-10 ||x0|| on the
/// training window, predicting from x0 with the CN model.
inline TrainingBoundReport check_training_bound(const SnapshotMatrix& X, const ReducedHermitianModel& model) {
  detail::require(model.scheme == Method::kCrankNicolson, "check_training_bound: requires a CN model");
  detail::require(X.dim() == model.dim(), "check_training_bound: dimension mismatch");
  const Index m = X.snapshots() - 1;
  const auto res = training_residuals(X, [&](const ComplexVector& v) { return apply_reduced_operator(model, v); });
  const ComplexVector x0 = X.data.col(0);
  const ComplexMatrix pred = predict_block(model, x0, std::nullopt, m);

  TrainingBoundReport rep;
  rep.slack = 1e-10 * x0.norm();
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (Index k = 0; k < m; ++k) {
    acc += res[static_cast<size_t>(k)];
    const double e = (X.data.col(k + 1) - pred.col(k)).norm();
    const double b = X.tau * acc;
    rep.error.push_back(e);
    rep.bound.push_back(b);
    const double margin = e - b - rep.slack;
    rep.worst_margin = std::max(rep.worst_margin, margin);
    if (margin > 0.0 && rep.holds) {
      rep.holds = false;
      rep.first_violation = k;
    }
  }
  return rep;
}

/// Toy data x_k = sum_i b_i phi_i exp(i k theta_i), k = 0..m.
struct ToySpec {
  Index n = 32;
  Index r = 5;
  std::vector<double> thetas;
  std::vector<Complex> amplitudes;
  Index m = 20;
  std::uint64_t seed = 0;

  /// Well-separated phases and unit-order amplitudes drawn from the seed.
  static ToySpec random(Index n, Index r, Index m, std::uint64_t seed) {
    ToySpec s{n, r, {}, {}, m, seed};
    boost::random::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ull);
    boost::random::uniform_real_distribution<double> u(0.0, 1.0);
    const double pi = std::numbers::pi;
    for (Index i = 0; i < r; ++i) {
      s.thetas.push_back(-pi + 2.0 * pi * (static_cast<double>(i) + 0.25 + 0.5 * u(gen)) / static_cast<double>(r));
      s.amplitudes.push_back(std::polar(0.5 + u(gen), 2.0 * pi * u(gen)));
    }
    return s;
  }
};

struct ToyData {
  SnapshotMatrix snapshots;   // n x (m+1), tau = 1
  ComplexMatrix modes;        // Phi_r, n x r orthonormal
  ComplexMatrix complement;   // Phi_r^perp, n x (n-r)
  ComplexVector eigenvalues;  // exp(i theta)
  ComplexVector amplitudes;
};

inline ToyData toy_generate(const ToySpec& spec) {
  detail::require(spec.n >= 1 && spec.r >= 1 && spec.r <= spec.n, "toy_generate: require 1 <= r <= n");
  detail::require(spec.m >= 1, "toy_generate: require m >= 1");
  detail::require(static_cast<Index>(spec.thetas.size()) == spec.r && static_cast<Index>(spec.amplitudes.size()) == spec.r,
                  "toy_generate: need r phases and r amplitudes");
  ToyData out;
  out.eigenvalues.resize(spec.r);
  out.amplitudes.resize(spec.r);
  for (Index i = 0; i < spec.r; ++i) {
    detail::require(spec.amplitudes[static_cast<size_t>(i)] != Complex(0.0), "toy_generate: amplitudes must be nonzero");
    out.eigenvalues(i) = std::polar(1.0, spec.thetas[static_cast<size_t>(i)]);
    out.amplitudes(i) = spec.amplitudes[static_cast<size_t>(i)];
    for (Index j = 0; j < i; ++j)
      detail::require(std::abs(out.eigenvalues(i) - out.eigenvalues(j)) > 1e-12, "toy_generate: phases must be mutually distinct");
  }

  boost::random::mt19937_64 gen(spec.seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix G(spec.n, spec.n);
  for (Index c = 0; c < spec.n; ++c)
    for (Index r = 0; r < spec.n; ++r) {
      const double re = normal(gen);
      const double im = normal(gen);
      G(r, c) = Complex(re, im);
    }
  const Eigen::HouseholderQR<ComplexMatrix> qr(G);
  const ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(spec.n, spec.n);
  out.modes = Q.leftCols(spec.r);
  out.complement = Q.rightCols(spec.n - spec.r);

  ComplexMatrix Z(spec.r, spec.m + 1);
  for (Index i = 0; i < spec.r; ++i)
    for (Index k = 0; k <= spec.m; ++k)
      Z(i, k) = out.amplitudes(i) * std::polar(1.0, static_cast<double>(k) * spec.thetas[static_cast<size_t>(i)]);
  out.snapshots.data = out.modes * Z;
  out.snapshots.tau = 1.0;
  out.snapshots.eps = 1.0;
  out.snapshots.grid = {0.0, 1.0, spec.n};
  return out;
}

/// -(eps/2) D2 + diag(V)/eps with D2 the periodic [1, -2, 1]/h^2 Laplacian.
inline ComplexMatrix build_reference_operator(const SpatialGrid& grid, double eps, const PotentialSpec& potential) {
  grid.validate();
  detail::require(eps > 0.0, "build_reference_operator: eps must be positive");
  const Index n = grid.n;
  const double h = grid.h();
  const double off = -(eps / 2.0) / (h * h);
  const RealVector v = potential.sample(grid);
  ComplexMatrix A = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    A(j, j) += -2.0 * off + v(j) / eps;
    A(j, (j + 1) % n) += off;
    A(j, (j + n - 1) % n) += off;
  }
  return A;
}

/// Wall-clock seconds of a callable on the monotonic clock.
template <class F>
double time_seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  std::forward<F>(f)();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace oscidmd
