#pragma once

// Shared builders for randomized tests. Everything is seeded; nothing here
// touches global state.

#include <cstdint>

#include "wiretap/matcore.hpp"
#include "wiretap/rng.hpp"

namespace wiretap::testing {

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

inline HermMatrix random_hermitian(Rng& rng, std::size_t n) {
  return HermMatrix::symmetrized(random_matrix(rng, n, n));
}

// G G* + eps I, comfortably PD.
inline HermMatrix random_pd(Rng& rng, std::size_t n, double eps = 0.1) {
  const Matrix g = random_matrix(rng, n, n);
  return HermMatrix::symmetrized(g * g.adjoint() + Matrix::identity(n) * eps);
}

// Random PSD with given rank and trace.
inline HermMatrix random_psd_rank(Rng& rng, std::size_t n, std::size_t rank, double trace) {
  if (rank == 0) return HermMatrix::zero(n);
  const Matrix g = random_matrix(rng, n, rank);
  HermMatrix k = HermMatrix::symmetrized(g * g.adjoint());
  const double t = k.trace_real();
  return herm_scale(k, trace / t);
}

// Haar-ish unitary via Gram-Schmidt on a Gaussian matrix.
inline Matrix random_unitary(Rng& rng, std::size_t n) {
  Matrix a = random_matrix(rng, n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      Complex dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += std::conj(a(i, k)) * a(i, j);
      for (std::size_t i = 0; i < n; ++i) a(i, j) -= dot * a(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(a(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) a(i, j) /= nrm;
  }
  return a;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-300});
}

}  // namespace wiretap::testing
