#pragma once

#include <cstdint>
#include <optional>

#include "wiretap/channel.hpp"
#include "wiretap/objective.hpp"

namespace wiretap {

/// Companion matrix of the stationarity condition in A, with its blocks and
/// the diagonal scaling F = diag(H_M K H_M* + I, I) used by the rank
/// factorization identity.
struct RiccatiProblem {
  Matrix M;  // (n_M + n_E) square
  Matrix M11, M12, M21, M22;
  Matrix F;
  WiretapChannel channel;
  HermMatrix K;
};

/// Candidate stationary point of the minimization over A. The polynomial
/// residual and the strict feasibility of I - AA* certify it.
struct RiccatiSolution {
  Matrix A;  // n_M x n_E
  Matrix V;  // r x r block (empty for the EVE closed form)
  Matrix W;  // n_M x (n_M - r) block (empty for the MAIN closed form)
  Matrix U_X;  // factor K = U_X U_X* (n x r; empty when not rank-based)
  Matrix Q;    // eigenspace of J associated with -1 (empty when not rank-based)
  double residual = 0.0;
  bool feasible = false;
  double feasibility_margin = 0.0;  // min eig of I - AA*
};

RiccatiProblem build_M(const WiretapChannel& ch, const HermMatrix& k);

/// Frobenius norm of M21 + M22 A* - A* M11 - A* M12 A*; zero iff A* is a
/// stationary point of the minimization over A.
double riccati_residual(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a);

/// Orthonormal basis of ker(M + I), by SVD at the rank tolerance.
Matrix eigenspace_minus_one(const RiccatiProblem& prob);

/// J = -(H_M K H_M* + I)^{-1}(H_M K H_E* H_E (H_M*H_M)^{-1} H_M* + I).
Matrix jordan_J(const WiretapChannel& ch, const HermMatrix& k);

enum class DegradedForm { MAIN, EVE };

/// Closed forms A* = H_E (H_M*H_M)^{-1} H_M* (MAIN) and
/// A* = H_E (H_E*H_E)^{-1} H_M* (EVE); they solve the Riccati equation for
/// every K, so the residual is evaluated at `k` (default: full-power
/// isotropic). The channel class must match strictly.
RiccatiSolution solve_A_degraded(const WiretapChannel& ch, DegradedForm which,
                                 const std::optional<HermMatrix>& k = std::nullopt);

/// Rank-r solution assembled from the Jordan basis:
/// A* = (H_E G_M^{-1} H_M* B H_M U_X V, H_E G_E^{-1} H_M* W)(B H_M U_X V, W)^{-1}
/// with B = (H_M K H_M* + I)^{-1}. The stacked basis must be invertible
/// (condition number below tol::cond_guard). Internally works with the
/// rank-truncated K = U_X U_X*.
RiccatiSolution solve_A_lowrank(const WiretapChannel& ch, const HermMatrix& k,
                                const Matrix& v, const Matrix& w);

/// Seeded search for (V, W) giving a feasible rank-r solution. W columns are
/// guided by the positive directions of I - H_M (H_E*H_E)^{-1} H_M*, per the
/// block-diagonal feasibility criterion. The existence guarantee only covers
/// INDEFINITE channels; on other classes the search runs and reports failure
/// honestly.
RiccatiSolution feasibility_search(const WiretapChannel& ch, const HermMatrix& k,
                                   std::uint64_t seed, int tries = 256);

}  // namespace wiretap
