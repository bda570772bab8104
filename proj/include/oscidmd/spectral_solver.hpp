#pragma once

// Strang-splitting Fourier pseudospectral integrator for the 1-D periodic
// semiclassical Schrodinger / Gross-Pitaevskii equation
//
//   i eps u_t = -(eps^2/2) u_xx + V(x) u + beta |u|^2 u,
//
// together with WKB initial data, the discrete mass/energy functionals and
// the downsampling used to build snapshot matrices.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <numbers>
#include <utility>
#include <variant>

#include "oscidmd/errors.hpp"
#include "oscidmd/linalg.hpp"

namespace oscidmd {

/// Periodic grid on [a, b) with points x_j = a + j*h, j = 1..n (stored 0-based).
struct SpatialGrid {
  double a = 0.0;
  double b = 1.0;
  Index n = 2;

  double length() const { return b - a; }
  double h() const { return (b - a) / static_cast<double>(n); }
  /// Coordinate of the 0-based point `j`, i.e. a + (j+1) h.
  double x(Index j) const { return a + static_cast<double>(j + 1) * h(); }

  RealVector points() const {
    RealVector out(n);
    for (Index j = 0; j < n; ++j) out(j) = x(j);
    return out;
  }

  void validate() const {
    detail::require(std::isfinite(a) && std::isfinite(b) && b > a, "SpatialGrid: require finite a < b");
    detail::require(n >= 2, "SpatialGrid: require n >= 2");
  }

  /// Grid keeping every `stride`-th point (fine points stride-1, 2 stride-1, ...).
  SpatialGrid coarsened(Index stride) const {
    detail::require(stride >= 1 && n % stride == 0, "SpatialGrid: spatial stride must divide n");
    return {a, b, n / stride};
  }

  bool operator==(const SpatialGrid&) const = default;
};

/// Real potential V(x): constant, harmonic q*x^2, or tabulated on the grid.
class PotentialSpec {
 public:
  struct Constant { double value = 0.0; };
  struct Harmonic { double coefficient = 0.0; double center = 0.0; };  // q (x - c)^2
  struct Tabulated { RealVector values; };

  PotentialSpec() = default;
  static PotentialSpec constant(double c) { return PotentialSpec(Constant{c}); }
  static PotentialSpec harmonic(double q, double center = 0.0) { return PotentialSpec(Harmonic{q, center}); }
  static PotentialSpec tabulated(RealVector values) {
    detail::require(values.allFinite(), "PotentialSpec: tabulated values must be finite");
    return PotentialSpec(Tabulated{std::move(values)});
  }

  RealVector sample(const SpatialGrid& grid) const {
    return std::visit(
        [&](const auto& v) -> RealVector {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return RealVector::Constant(grid.n, v.value);
          } else if constexpr (std::is_same_v<T, Harmonic>) {
            const RealVector x = grid.points();
            return v.coefficient * (x.array() - v.center).square().matrix();
          } else {
            detail::require(v.values.size() == grid.n, "PotentialSpec: tabulated length must equal grid size");
            return v.values;
          }
        },
        spec_);
  }

  const std::variant<Constant, Harmonic, Tabulated>& variant() const { return spec_; }

 private:
  explicit PotentialSpec(std::variant<Constant, Harmonic, Tabulated> s) : spec_(std::move(s)) {}
  std::variant<Constant, Harmonic, Tabulated> spec_{Constant{}};
};

/// WKB data sqrt(n0(x)) exp(i S0(x) / eps).
struct WkbSpec {
  std::function<double(double)> density;  // n0
  std::function<double(double)> phase;    // S0
  double eps = 1.0;
};

/// n0 = exp(-w (x - c)^2)^2 with c the midpoint, S0 = -(x - a)(x - b)/50.
inline WkbSpec wkb_quadratic_phase(double a, double b, double width, double eps) {
  const double c = 0.5 * (a + b);
  return {[=](double x) {
            const double g = std::exp(-width * (x - c) * (x - c));
            return g * g;
          },
          [=](double x) { return -(x - a) * (x - b) / 50.0; }, eps};
}

/// n0 = exp(-w (x - c)^2)^2, S0 = -(1/5) ln(e^{5(x-c)} + e^{-5(x-c)}).
inline WkbSpec wkb_logcosh_phase(double a, double b, double width, double eps) {
  const double c = 0.5 * (a + b);
  return {[=](double x) {
            const double g = std::exp(-width * (x - c) * (x - c));
            return g * g;
          },
          [=](double x) {
            const double y = 5.0 * std::abs(x - c);
            return -(y + std::log1p(std::exp(-2.0 * y))) / 5.0;
          },
          eps};
}

inline ComplexVector wkb_initial(const WkbSpec& spec, const SpatialGrid& grid) {
  grid.validate();
  detail::require(spec.eps > 0.0, "wkb_initial: eps must be positive");
  detail::require(static_cast<bool>(spec.density) && static_cast<bool>(spec.phase), "wkb_initial: empty profile");
  ComplexVector u(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    const double n0 = spec.density(x);
    detail::require(std::isfinite(n0) && n0 >= 0.0, "wkb_initial: density n0 must be nonnegative");
    u(j) = std::polar(std::sqrt(n0), spec.phase(x) / spec.eps);
  }
  return u;
}

struct SolverConfig {
  SpatialGrid grid;  // fine integration grid
  double eps = 1.0;
  PotentialSpec potential;
  double beta = 0.0;  // 0 for the linear equation, eps for the weak GPE
  double tau_e = 1e-3;
  Index steps = 0;
  Index downsample_time = 1;
  Index downsample_space = 1;

  void validate() const {
    grid.validate();
    detail::require(grid.n % 2 == 0, "SolverConfig: grid size must be even");
    detail::require(eps > 0.0 && std::isfinite(eps), "SolverConfig: eps must be positive");
    detail::require(std::isfinite(beta), "SolverConfig: beta must be finite");
    detail::require(tau_e > 0.0 && std::isfinite(tau_e), "SolverConfig: tau_e must be positive");
    detail::require(steps >= 0, "SolverConfig: steps must be nonnegative");
    detail::require(downsample_time >= 1 && steps % downsample_time == 0,
                    "SolverConfig: downsample_time must divide steps");
    detail::require(downsample_space >= 1 && grid.n % downsample_space == 0,
                    "SolverConfig: downsample_space must divide the grid size");
  }
};

/// Complex n x (m+1) matrix of states; column k is the state at t_k = k*tau.
struct SnapshotMatrix {
  ComplexMatrix data;
  double tau = 1.0;
  SpatialGrid grid;
  double eps = 1.0;

  Index dim() const { return data.rows(); }
  Index snapshots() const { return data.cols(); }
  ComplexVector column(Index k) const { return data.col(k); }

  /// Columns [first, first + count) with the same metadata.
  SnapshotMatrix slice(Index first, Index count) const {
    detail::require(first >= 0 && count >= 0 && first + count <= data.cols(), "SnapshotMatrix: slice out of range");
    return {data.middleCols(first, count), tau, grid, eps};
  }
};

/// Periodic wavenumbers in FFT order: 2 pi k / L, k = 0..n/2-1, -n/2..-1.
inline RealVector fourier_wavenumbers(const SpatialGrid& grid) {
  RealVector xi(grid.n);
  const double base = 2.0 * std::numbers::pi / grid.length();
  for (Index k = 0; k < grid.n; ++k) {
    const Index kk = k < grid.n / 2 ? k : k - grid.n;
    xi(k) = base * static_cast<double>(kk);
  }
  return xi;
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Unnormalized in-place 1-D complex FFT over an owned, FFTW-aligned buffer.
class FourierTransform {
 public:
  explicit FourierTransform(Index n) : n_(n) {
    detail::require(n >= 1, "FourierTransform: size must be positive");
    std::lock_guard lock(detail::fftw_planner_mutex());
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<size_t>(n)));
    if (buffer_ == nullptr) throw std::bad_alloc();
    const int len = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(len, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(len, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;
  FourierTransform(FourierTransform&& other) noexcept { swap(other); }
  FourierTransform& operator=(FourierTransform&& other) noexcept {
    swap(other);
    return *this;
  }
  ~FourierTransform() {
    if (buffer_ == nullptr) return;
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }

  Index size() const { return n_; }
  Complex* data() { return reinterpret_cast<Complex*>(buffer_); }
  Eigen::Map<ComplexVector> view() { return {data(), n_}; }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  void swap(FourierTransform& o) noexcept {
    std::swap(n_, o.n_);
    std::swap(buffer_, o.buffer_);
    std::swap(forward_, o.forward_);
    std::swap(backward_, o.backward_);
  }

  Index n_ = 0;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Stateful stepper reusing FFT plans and precomputed phase factors.
class StrangSolver {
 public:
  explicit StrangSolver(const SolverConfig& cfg) : cfg_(cfg), fft_(cfg.grid.n) {
    cfg_.validate();
    const Index n = cfg_.grid.n;
    potential_ = cfg_.potential.sample(cfg_.grid);
    const RealVector xi = fourier_wavenumbers(cfg_.grid);
    kinetic_.resize(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Index k = 0; k < n; ++k)
      kinetic_(k) = std::polar(inv_n, -cfg_.eps * cfg_.tau_e * xi(k) * xi(k) / 2.0);
    half_potential_.resize(n);
    for (Index j = 0; j < n; ++j)
      half_potential_(j) = std::polar(1.0, -cfg_.tau_e * potential_(j) / (2.0 * cfg_.eps));
  }

  const SolverConfig& config() const { return cfg_; }

  void step(ComplexVector& u) {
    detail::require(u.size() == cfg_.grid.n, "strang_step: state length must equal grid size");
    auto buf = fft_.view();
    buf = u;
    potential_half_step(buf);
    fft_.forward();
    buf.array() *= kinetic_.array();
    fft_.backward();
    potential_half_step(buf);
    u = buf;
  }

 private:
  void potential_half_step(Eigen::Map<ComplexVector>& v) const {
    if (cfg_.beta == 0.0) {
      v.array() *= half_potential_.array();
      return;
    }
    const double c = -cfg_.tau_e / (2.0 * cfg_.eps);
    for (Index j = 0; j < v.size(); ++j)
      v(j) *= std::polar(1.0, c * (potential_(j) + cfg_.beta * std::norm(v(j))));
  }

  SolverConfig cfg_;
  FourierTransform fft_;
  RealVector potential_;
  ComplexVector kinetic_;
  ComplexVector half_potential_;
};

/// One Strang step of size cfg.tau_e on cfg.grid.
inline ComplexVector strang_step(const ComplexVector& u, const SolverConfig& cfg) {
  StrangSolver solver(cfg);
  ComplexVector out = u;
  solver.step(out);
  return out;
}

/// Integrates cfg.steps fine steps from u0 and keeps every downsample_time-th
/// state (starting at t = 0) on every downsample_space-th grid point.
inline SnapshotMatrix simulate(const ComplexVector& u0, const SolverConfig& cfg) {
  cfg.validate();
  detail::require(u0.size() == cfg.grid.n, "simulate: initial state length must equal grid size");
  const Index ds = cfg.downsample_space;
  const SpatialGrid coarse = cfg.grid.coarsened(ds);
  const Index kept = cfg.steps / cfg.downsample_time + 1;

  SnapshotMatrix out;
  out.grid = coarse;
  out.eps = cfg.eps;
  out.tau = cfg.tau_e * static_cast<double>(cfg.downsample_time);
  out.data.resize(coarse.n, kept);

  auto store = [&](const ComplexVector& u, Index col) {
    for (Index j = 0; j < coarse.n; ++j) out.data(j, col) = u((j + 1) * ds - 1);
  };

  StrangSolver solver(cfg);
  ComplexVector u = u0;
  store(u, 0);
  for (Index s = 1; s <= cfg.steps; ++s) {
    solver.step(u);
    if (s % cfg.downsample_time == 0) store(u, s / cfg.downsample_time);
  }
  return out;
}

/// Discrete mass h * sum |u_j|^2.
inline double mass(const ComplexVector& u, const SpatialGrid& grid) {
  detail::require(u.size() == grid.n, "mass: state length must equal grid size");
  return grid.h() * u.squaredNorm();
}

/// Spectral derivative of a periodic grid function.
inline ComplexVector fourier_gradient(const ComplexVector& u, const SpatialGrid& grid) {
  detail::require(u.size() == grid.n, "fourier_gradient: state length must equal grid size");
  FourierTransform fft(grid.n);
  auto buf = fft.view();
  buf = u;
  fft.forward();
  const RealVector xi = fourier_wavenumbers(grid);
  const double inv_n = 1.0 / static_cast<double>(grid.n);
  for (Index k = 0; k < grid.n; ++k) buf(k) *= Complex(0.0, xi(k) * inv_n);
  fft.backward();
  return buf;
}

/// Discrete energy h * sum [ (eps^2/2) |u_x|^2 + V |u|^2 ], u_x spectral.
inline double energy(const ComplexVector& u, const SpatialGrid& grid, double eps, const PotentialSpec& potential) {
  detail::require(u.size() == grid.n, "energy: state length must equal grid size");
  const ComplexVector du = fourier_gradient(u, grid);
  const RealVector v = potential.sample(grid);
  double acc = 0.0;
  for (Index j = 0; j < grid.n; ++j) acc += 0.5 * eps * eps * std::norm(du(j)) + v(j) * std::norm(u(j));
  return grid.h() * acc;
}

}  // namespace oscidmd
