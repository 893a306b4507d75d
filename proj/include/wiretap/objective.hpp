#pragma once

#include <optional>

#include "wiretap/channel.hpp"
#include "wiretap/matcore.hpp"

namespace wiretap {

/// Candidate transmit covariance. Tiny negative eigenvalues (boundary noise
/// from iterative optimizers) are clipped to zero at construction; anything
/// below -tol::rank * scale is rejected.
class InputCovariance {
 public:
  InputCovariance() = default;
  static InputCovariance make(const HermMatrix& k);
  const HermMatrix& K() const { return k_; }
  std::size_t dim() const { return k_.dim(); }
  double trace() const { return k_.trace_real(); }
  bool feasible_for(double power) const { return trace() <= power + 1e-9; }

 private:
  HermMatrix k_;
};

/// Noise coupling A (n_M x n_E) with the strict feasibility I - AA* PD.
class NoiseCorrelation {
 public:
  static NoiseCorrelation make(const Matrix& a);  // throws CorrelationInfeasible
  static std::optional<NoiseCorrelation> try_make(const Matrix& a);
  const Matrix& A() const { return a_; }
  /// min eigenvalue of I - AA*.
  double feasibility_margin() const { return margin_; }

 private:
  Matrix a_;
  double margin_ = 0.0;
};

struct SecrecyGradient {
  HermMatrix G;
};

/// The four algebraically equal ways of evaluating the conditional mutual
/// information bound; kept separate so they cross-check each other.
enum class TildeForm { JOINT, BFORM, SCHUR, RAW };

/// logdet(I + H_M K H_M*) - logdet(I + H_E K H_E*), in nats.
double secrecy_rate(const WiretapChannel& ch, const InputCovariance& k);
double secrecy_rate(const WiretapChannel& ch, const HermMatrix& k);

/// Gradient of secrecy_rate in K; for K PD this equals
/// ((H_M*H_M)^{-1}+K)^{-1} - ((H_E*H_E)^{-1}+K)^{-1}.
SecrecyGradient secrecy_grad(const WiretapChannel& ch, const InputCovariance& k);
HermMatrix secrecy_grad(const WiretapChannel& ch, const HermMatrix& k);

/// B(A) = (H_M* - H_E* A*)(I - AA*)^{-1}(H_M - A H_E) + H_E*H_E.
HermMatrix B_of_A(const WiretapChannel& ch, const NoiseCorrelation& a);
HermMatrix B_of_A(const WiretapChannel& ch, const Matrix& a);

double tilde_I(const WiretapChannel& ch, const InputCovariance& k,
               const NoiseCorrelation& a, TildeForm form);
double tilde_I(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a,
               TildeForm form);

/// Gradient of tilde_I in K at fixed A: (B^{-1}+K)^{-1} - ((H_E*H_E)^{-1}+K)^{-1}.
HermMatrix tilde_I_grad_K(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a);

/// Differential entropy of a circularly symmetric complex Gaussian: logdet(pi e K).
double gaussian_entropy(const HermMatrix& k);

/// Conditional covariance K_U of (A+B)/sqrt(2) given (A-B)/sqrt(2), computed by
/// congruence with the unitary (1/sqrt 2)[[I,-I],[I,I]] on the joint covariance
/// of the stacked vector (A; B).
HermMatrix conditional_cov_U(const HermMatrix& k_joint);

/// Residual |h(X+A, X+B) - h(sqrt2 X + U) - h((A-B)/sqrt2)| for Gaussian X with
/// covariance k_x independent of (A, B).
double entropy_decomposition_check(const HermMatrix& k_joint, const HermMatrix& k_x);

}  // namespace wiretap
