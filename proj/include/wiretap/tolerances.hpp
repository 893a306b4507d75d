#pragma once

// Central tolerance knobs. Every module reads these; nothing redefines them
// locally, so the numerical contracts cannot drift apart between modules.
namespace wiretap::tol {

// Hermitian deviation: max |m(i,j) - conj(m(j,i))| <= symmetry * max(1, ||M||_F).
inline constexpr double symmetry = 1e-12;

// Positive definiteness: min eigenvalue > pd * ||M||_F.
inline constexpr double pd = 1e-10;

// Eigenvalue dead zone for rank / sign decisions: |lambda| <= rank * scale.
inline constexpr double rank = 1e-9;

// ||A - B||_F <= zero * max(||A||_F, ||B||_F, 1) counts as the zero matrix.
inline constexpr double zero = 1e-12;

// Budget for matrix-identity residuals (Riccati, degraded identity, kernels).
inline constexpr double identity_residual = 1e-8;

// Refuse to invert stacked bases beyond this 2-norm condition number.
inline constexpr double cond_guard = 1e12;

}  // namespace wiretap::tol
