#pragma once

// Test-side helpers. Random matrices come from std::mt19937_64 so they are
// independent of the library's generator.

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "oscidmd/linalg.hpp"

namespace testing_support {

using oscidmd::Complex;
using oscidmd::ComplexMatrix;
using oscidmd::ComplexVector;
using oscidmd::Index;

inline ComplexMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  ComplexMatrix M(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = nd(gen);
      M(r, c) = Complex(re, nd(gen));
    }
  return M;
}

inline ComplexVector random_vector(Index n, std::uint64_t seed) {
  return random_matrix(n, 1, seed).col(0);
}

/// Orthonormal columns by modified Gram-Schmidt, run twice.
inline ComplexMatrix gram_schmidt(ComplexMatrix Q) {
  for (int pass = 0; pass < 2; ++pass)
    for (Index j = 0; j < Q.cols(); ++j) {
      for (Index i = 0; i < j; ++i) Q.col(j) -= Q.col(i).dot(Q.col(j)) * Q.col(i);
      Q.col(j) /= Q.col(j).norm();
    }
  return Q;
}

inline ComplexMatrix random_unitary(Index n, std::uint64_t seed) {
  return gram_schmidt(random_matrix(n, n, seed));
}

inline ComplexMatrix random_hermitian(Index n, std::uint64_t seed) {
  const ComplexMatrix G = random_matrix(n, n, seed);
  return (G + G.adjoint()) * 0.5;
}

/// Greedy matching distance between two unordered complex lists.
inline double permutation_distance(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(static_cast<size_t>(b.size()), false);
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index arg = -1;
    for (Index j = 0; j < b.size(); ++j)
      if (!used[static_cast<size_t>(j)] && std::abs(a(i) - b(j)) < best) {
        best = std::abs(a(i) - b(j));
        arg = j;
      }
    used[static_cast<size_t>(arg)] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace testing_support
