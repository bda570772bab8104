#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oscidmd/experiments.hpp"
#include "oscidmd/spectral_solver.hpp"
#include "support.hpp"

using namespace oscidmd;
using namespace testing_support;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexVector fourier_mode(const SpatialGrid& g, double xi) {
  ComplexVector u(g.n);
  for (Index j = 0; j < g.n; ++j) u(j) = std::polar(1.0, xi * g.x(j));
  return u;
}

// Smooth periodic test problem on [0, 2 pi): V = 1 + cos x, u0 = exp(sin x) e^{i cos x}.
SolverConfig smooth_config(Index n, double tau_e, Index steps) {
  SolverConfig cfg;
  cfg.grid = {0.0, 2.0 * kPi, n};
  cfg.eps = 1.0;
  RealVector v(n);
  for (Index j = 0; j < n; ++j) v(j) = 1.0 + std::cos(cfg.grid.x(j));
  cfg.potential = PotentialSpec::tabulated(v);
  cfg.tau_e = tau_e;
  cfg.steps = steps;
  return cfg;
}

ComplexVector smooth_initial(const SpatialGrid& g) {
  ComplexVector u(g.n);
  for (Index j = 0; j < g.n; ++j) u(j) = std::polar(std::exp(std::sin(g.x(j))), std::cos(g.x(j)));
  return u;
}

ComplexVector terminal(const SolverConfig& cfg) {
  const SnapshotMatrix X = simulate(smooth_initial(cfg.grid), cfg);
  return X.data.col(X.snapshots() - 1);
}

}  // namespace

TEST(Grid, PointsExcludeLeftEndpoint) {
  const SpatialGrid g{0.0, 2.0, 200};
  EXPECT_DOUBLE_EQ(g.h(), 0.01);
  EXPECT_DOUBLE_EQ(g.x(0), 0.01);
  EXPECT_DOUBLE_EQ(g.x(199), 2.0);
  EXPECT_THROW((SpatialGrid{1.0, 1.0, 4}.validate()), ValidationError);
  EXPECT_THROW((SpatialGrid{0.0, 1.0, 1}.validate()), ValidationError);
}

TEST(Wavenumbers, FftOrdering) {
  const RealVector xi = fourier_wavenumbers({0.0, 2.0 * kPi, 6});
  const double expected[] = {0, 1, 2, -3, -2, -1};
  for (Index k = 0; k < 6; ++k) EXPECT_NEAR(xi(k), expected[k], 1e-14);
}

TEST(Wkb, UnitDensityZeroPhaseIsOnes) {
  const SpatialGrid g{0.0, 1.0, 16};
  const WkbSpec spec{[](double) { return 1.0; }, [](double) { return 0.0; }, 0.1};
  const ComplexVector u = wkb_initial(spec, g);
  EXPECT_EQ(u, ComplexVector::Ones(16));
}

TEST(Wkb, QuadraticProfileMatchesScalarEvaluator) {
  const SpatialGrid g{0.0, 2.0, 200};
  const double eps = 1e-2;
  const ComplexVector u = wkb_initial(wkb_quadratic_phase(0.0, 2.0, 25.0, eps), g);
  for (Index j = 0; j < g.n; ++j) {
    const double x = 0.01 * static_cast<double>(j + 1);
    const Complex oracle = std::exp(-25.0 * (x - 1.0) * (x - 1.0)) * std::exp(Complex(0.0, -x * (x - 2.0) / 50.0 / eps));
    EXPECT_LT(std::abs(u(j) - oracle), 1e-12) << j;
  }
  EXPECT_NEAR(std::abs(u(99)), 1.0, 1e-15);
  EXPECT_NEAR(std::norm(u(49)), std::exp(-12.5), 1e-18);
  EXPECT_NEAR(std::abs(u(49)), std::exp(-6.25), 1e-15);
}

TEST(Wkb, LogcoshProfileMatchesScalarEvaluator) {
  const SpatialGrid g{0.0, 10.0, 1000};
  const double eps = 1e-2;
  const ComplexVector u = wkb_initial(wkb_logcosh_phase(0.0, 10.0, 25.0, eps), g);
  for (Index j = 0; j < g.n; j += 37) {
    const double x = g.x(j);
    const double s0 = -std::log(std::exp(5.0 * (x - 5.0)) + std::exp(-5.0 * (x - 5.0))) / 5.0;
    // Compare phases modulo 2 pi through the unit-modulus factor.
    const Complex oracle = std::exp(-25.0 * (x - 5.0) * (x - 5.0)) * std::exp(Complex(0.0, s0 / eps));
    EXPECT_LT(std::abs(u(j) - oracle), 1e-9) << j;
  }
}

TEST(Wkb, PhaseShiftByTwoPiEpsIsInvisible) {
  const SpatialGrid g{0.0, 2.0, 64};
  const double eps = 0.05;
  WkbSpec a = wkb_quadratic_phase(0.0, 2.0, 25.0, eps);
  WkbSpec b = a;
  b.phase = [p = a.phase, eps](double x) { return p(x) + 2.0 * kPi * eps; };
  EXPECT_LT((wkb_initial(a, g) - wkb_initial(b, g)).norm(), 1e-13);
}

TEST(Wkb, NegativeDensityRejected) {
  const WkbSpec spec{[](double x) { return x - 0.5; }, [](double) { return 0.0; }, 1.0};
  EXPECT_THROW(wkb_initial(spec, {0.0, 1.0, 8}), ValidationError);
}

TEST(Strang, SingleModeKineticStepIsExact) {
  SolverConfig cfg;
  cfg.grid = {0.0, 2.0 * kPi, 32};
  cfg.eps = 0.3;
  cfg.tau_e = 0.01;
  const double xi = 1.0;
  const ComplexVector u = fourier_mode(cfg.grid, xi);
  const ComplexVector out = strang_step(u, cfg);
  const Complex phase = std::exp(Complex(0.0, -cfg.eps * cfg.tau_e * xi * xi / 2.0));
  EXPECT_LT((out - phase * u).norm(), 1e-13);
}

TEST(Strang, ConstantPotentialConstantStateGetsScalarPhase) {
  SolverConfig cfg;
  cfg.grid = {0.0, 1.0, 16};
  cfg.eps = 1e-2;
  cfg.potential = PotentialSpec::constant(10.0);
  cfg.tau_e = 1e-3;
  const ComplexVector u = ComplexVector::Constant(16, Complex(0.6, 0.8));
  const Complex phase = std::exp(Complex(0.0, -cfg.tau_e * 10.0 / cfg.eps));
  EXPECT_LT((strang_step(u, cfg) - phase * u).norm(), 1e-13);
}

TEST(Strang, NonlinearConstantStateRotatesWithDensity) {
  SolverConfig cfg;
  cfg.grid = {-3.0, 3.0, 32};
  cfg.eps = 0.1;
  cfg.beta = 0.1;
  cfg.tau_e = 1e-2;
  cfg.steps = 50;
  const Complex c(1.5, 0.0);
  const SnapshotMatrix X = simulate(ComplexVector::Constant(32, c), cfg);
  const double t = 50 * cfg.tau_e;
  const Complex oracle = c * std::exp(Complex(0.0, -t * cfg.beta * std::norm(c) / cfg.eps));
  EXPECT_LT((X.data.col(50) - ComplexVector::Constant(32, oracle)).norm(), 1e-12);
}

TEST(Strang, NormPreservedPerStep) {
  for (double beta : {0.0, 0.05}) {
    SolverConfig cfg = smooth_config(128, 1e-2, 0);
    cfg.beta = beta;
    StrangSolver solver(cfg);
    ComplexVector u = random_vector(128, 7);
    for (int s = 0; s < 200; ++s) {
      const double before = u.norm();
      solver.step(u);
      EXPECT_LE(std::abs(u.norm() - before), 1e-13 * before);
    }
  }
}

TEST(Strang, OddGridRejected) {
  SolverConfig cfg;
  cfg.grid = {0.0, 1.0, 15};
  EXPECT_THROW(strang_step(ComplexVector::Ones(15), cfg), ValidationError);
}

TEST(Strang, TemporalOrderAtLeastTwo) {
  const double T = 1.0;
  const ComplexVector ref = terminal(smooth_config(64, T / 800.0, 800));
  const double e1 = (terminal(smooth_config(64, T / 100.0, 100)) - ref).norm();
  const double e2 = (terminal(smooth_config(64, T / 200.0, 200)) - ref).norm();
  EXPECT_GE(std::log2(e1 / e2), 1.8);
}

TEST(Strang, SpatialConvergenceIsSpectral) {
  // Same tau on every grid isolates the spatial error; coarse points are a
  // subset of the reference points.
  const double tau = 1e-2;
  const Index steps = 50;
  const Index nref = 256;
  const ComplexVector ref = terminal(smooth_config(nref, tau, steps));
  double prev = INFINITY;
  for (Index n : {8, 16, 32}) {
    const ComplexVector u = terminal(smooth_config(n, tau, steps));
    const Index stride = nref / n;
    double err = 0.0;
    for (Index j = 0; j < n; ++j) err = std::max(err, std::abs(u(j) - ref((j + 1) * stride - 1)));
    if (prev > 1e-11) {
      EXPECT_LE(err, prev / 10.0) << "n = " << n;
    }
    prev = err;
  }
}

TEST(Simulate, ZeroStepsReturnsInitialState) {
  SolverConfig cfg = smooth_config(16, 1e-2, 0);
  const ComplexVector u0 = smooth_initial(cfg.grid);
  const SnapshotMatrix X = simulate(u0, cfg);
  ASSERT_EQ(X.snapshots(), 1);
  EXPECT_EQ(X.data.col(0), u0);
}

TEST(Simulate, DownsamplingKeepsMatchingStates) {
  SolverConfig fine = smooth_config(32, 1e-2, 12);
  const SnapshotMatrix F = simulate(smooth_initial(fine.grid), fine);
  SolverConfig coarse = fine;
  coarse.downsample_time = 3;
  coarse.downsample_space = 4;
  const SnapshotMatrix C = simulate(smooth_initial(fine.grid), coarse);
  ASSERT_EQ(C.dim(), 8);
  ASSERT_EQ(C.snapshots(), 5);
  EXPECT_DOUBLE_EQ(C.tau, 3e-2);
  EXPECT_EQ(C.grid, (SpatialGrid{0.0, 2.0 * kPi, 8}));
  for (Index k = 0; k < 5; ++k)
    for (Index j = 0; j < 8; ++j) EXPECT_EQ(C.data(j, k), F.data(4 * j + 3, 3 * k));
}

TEST(Simulate, StrideMismatchRejected) {
  SolverConfig cfg = smooth_config(32, 1e-2, 10);
  cfg.downsample_time = 3;
  EXPECT_THROW(simulate(smooth_initial(cfg.grid), cfg), ValidationError);
  cfg.downsample_time = 1;
  cfg.downsample_space = 3;
  EXPECT_THROW(simulate(smooth_initial(cfg.grid), cfg), ValidationError);
}

TEST(Simulate, ForwardPropagationShape) {
  const SnapshotMatrix X = experiments::generate(experiments::preset("exp-4.1").data, 100);
  EXPECT_EQ(X.dim(), 200);
  EXPECT_EQ(X.snapshots(), 100);
  EXPECT_DOUBLE_EQ(X.tau, 1e-2);
}

TEST(Simulate, HarmonicTrapShape) {
  const SnapshotMatrix X = experiments::generate(experiments::preset("exp-4.2").data, 80);
  EXPECT_EQ(X.dim(), 250);
  EXPECT_EQ(X.snapshots(), 80);
  EXPECT_NEAR(X.tau, 1e-2, 1e-17);
  EXPECT_NEAR(X.grid.h(), 4e-3, 1e-17);
}

TEST(Mass, Examples) {
  EXPECT_NEAR(mass(ComplexVector::Ones(10), {0.0, 1.0, 10}), 1.0, 1e-15);
  EXPECT_EQ(mass(ComplexVector::Zero(10), {0.0, 1.0, 10}), 0.0);
}

TEST(Mass, GaussianMatchesClosedFormIntegral) {
  const SpatialGrid g{0.0, 2.0, 400};
  const ComplexVector u = wkb_initial(wkb_quadratic_phase(0.0, 2.0, 25.0, 0.1), g);
  // integral of exp(-50 (x-1)^2) over the line.
  EXPECT_NEAR(mass(u, g), std::sqrt(kPi / 50.0), 1e-12);
}

TEST(Energy, ConstantStateIsPotentialTimesMass) {
  const SpatialGrid g{0.0, 1.0, 16};
  const ComplexVector u = ComplexVector::Constant(16, Complex(0.3, -0.4));
  EXPECT_NEAR(energy(u, g, 0.1, PotentialSpec::constant(7.0)), 7.0 * mass(u, g), 1e-13);
}

TEST(Energy, SingleModeMatchesClosedForm) {
  const SpatialGrid g{0.0, 2.0 * kPi, 64};
  const double eps = 0.2;
  for (double xi : {1.0, 3.0, 10.0}) {
    const double oracle = 0.5 * eps * eps * xi * xi * 2.0 * kPi;
    EXPECT_NEAR(energy(fourier_mode(g, xi), g, eps, PotentialSpec::constant(0.0)), oracle, 1e-11 * oracle);
  }
}

TEST(Energy, HarmonicPotentialTerm) {
  const SpatialGrid g{-1.0, 1.0, 8};
  const ComplexVector u = ComplexVector::Ones(8);
  double oracle = 0.0;
  for (Index j = 0; j < 8; ++j) oracle += 3.0 * (g.x(j) - 0.25) * (g.x(j) - 0.25) * g.h();
  EXPECT_NEAR(energy(u, g, 1.0, PotentialSpec::harmonic(3.0, 0.25)), oracle, 1e-13);
}

TEST(Energy, ConservedByLinearFlowToSplittingAccuracy) {
  const SolverConfig cfg = smooth_config(64, 1e-3, 1000);
  const SnapshotMatrix X = simulate(smooth_initial(cfg.grid), cfg);
  const double e0 = energy(X.data.col(0), cfg.grid, 1.0, cfg.potential);
  const double e1 = energy(X.data.col(1000), cfg.grid, 1.0, cfg.potential);
  EXPECT_LT(std::abs(e1 - e0) / std::abs(e0), 1e-5);
}
