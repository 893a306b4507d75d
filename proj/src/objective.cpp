#include "wiretap/objective.hpp"

#include <cmath>

namespace wiretap {

namespace {

constexpr double kLogPiE = 2.1447298858494001741434273513530587;  // ln(pi e)

HermMatrix identity_plus(const Matrix& m) {
  return HermMatrix::symmetrized(Matrix::identity(m.rows()) + m);
}

// I - AA*, with the strict PD feasibility check. The identity fixes the
// natural scale here, so the threshold keeps an absolute floor even when the
// gap matrix itself is nearly zero.
HermMatrix feasible_gap(const Matrix& a) {
  const HermMatrix gap =
      HermMatrix::symmetrized(Matrix::identity(a.rows()) - a * a.adjoint());
  if (min_eig_herm(gap) <= std::max(pd_threshold(gap), tol::pd))
    throw CorrelationInfeasible("I - AA* is not strictly positive definite");
  return gap;
}

void check_shapes(const WiretapChannel& ch, const HermMatrix& k) {
  if (k.dim() != ch.n()) throw DimensionMismatch("K must be n x n");
}

void check_shapes(const WiretapChannel& ch, const Matrix& a) {
  if (a.rows() != ch.n_M() || a.cols() != ch.n_E())
    throw DimensionMismatch("A must be n_M x n_E");
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

InputCovariance InputCovariance::make(const HermMatrix& k) {
  const EigenH e = eig_herm(k);
  const double scale = std::max(k.frobenius_norm(), 1.0);
  const std::size_t n = k.dim();
  if (!e.values.empty() && e.values.front() < -tol::rank * scale)
    throw NotPositiveDefinite("InputCovariance: eigenvalue " +
                              std::to_string(e.values.front()) + " below -rank_tol");
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        s += e.vectors(i, m) * std::conj(e.vectors(j, m)) * std::max(e.values[m], 0.0);
      r(i, j) = s;
    }
  InputCovariance out;
  out.k_ = HermMatrix::symmetrized(r);
  return out;
}

NoiseCorrelation NoiseCorrelation::make(const Matrix& a) {
  if (!a.all_finite()) throw InvalidMatrix("NoiseCorrelation: non-finite entries");
  NoiseCorrelation out;
  out.a_ = a;
  out.margin_ = min_eig_herm(feasible_gap(a));
  return out;
}

std::optional<NoiseCorrelation> NoiseCorrelation::try_make(const Matrix& a) {
  try {
    return make(a);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Secrecy rate and gradient
// ---------------------------------------------------------------------------

double secrecy_rate(const WiretapChannel& ch, const HermMatrix& k) {
  check_shapes(ch, k);
  const double main_term = logdet_pd(identity_plus(ch.H_M * k.matrix() * ch.H_M.adjoint()));
  const double eve_term = logdet_pd(identity_plus(ch.H_E * k.matrix() * ch.H_E.adjoint()));
  return main_term - eve_term;
}

double secrecy_rate(const WiretapChannel& ch, const InputCovariance& k) {
  return secrecy_rate(ch, k.K());
}

HermMatrix secrecy_grad(const WiretapChannel& ch, const HermMatrix& k) {
  check_shapes(ch, k);
  const Matrix inv_m = inv_pd(identity_plus(ch.H_M * k.matrix() * ch.H_M.adjoint())).matrix();
  const Matrix inv_e = inv_pd(identity_plus(ch.H_E * k.matrix() * ch.H_E.adjoint())).matrix();
  return HermMatrix::symmetrized(ch.H_M.adjoint() * inv_m * ch.H_M -
                                 ch.H_E.adjoint() * inv_e * ch.H_E);
}

SecrecyGradient secrecy_grad(const WiretapChannel& ch, const InputCovariance& k) {
  return {secrecy_grad(ch, k.K())};
}

// ---------------------------------------------------------------------------
// The conditional mutual information bound
// ---------------------------------------------------------------------------

HermMatrix B_of_A(const WiretapChannel& ch, const Matrix& a) {
  check_shapes(ch, a);
  const HermMatrix gap_inv = inv_pd(feasible_gap(a));
  const Matrix left = ch.H_M.adjoint() - ch.H_E.adjoint() * a.adjoint();  // H_M* - H_E* A*
  return HermMatrix::symmetrized(left * gap_inv.matrix() * left.adjoint() +
                                 ch.gram_eve().matrix());
}

HermMatrix B_of_A(const WiretapChannel& ch, const NoiseCorrelation& a) {
  return B_of_A(ch, a.A());
}

namespace {

Matrix assemble_kme(const WiretapChannel& ch, const Matrix& a) {
  const std::size_t nm = ch.n_M(), ne = ch.n_E();
  Matrix kme(nm + ne, nm + ne);
  kme.set_block(0, 0, Matrix::identity(nm));
  kme.set_block(0, nm, a);
  kme.set_block(nm, 0, a.adjoint());
  kme.set_block(nm, nm, Matrix::identity(ne));
  return kme;
}

double tilde_joint(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a) {
  const Matrix stacked = Matrix::vcat(ch.H_M, ch.H_E);
  const HermMatrix kme_inv = inv_pd(HermMatrix::symmetrized(assemble_kme(ch, a)));
  const HermMatrix gram =
      HermMatrix::symmetrized(stacked.adjoint() * kme_inv.matrix() * stacked);
  const Matrix khalf = sqrt_psd(k).matrix();
  const double joint_term = logdet_pd(identity_plus(khalf * gram.matrix() * khalf));
  const double eve_term = logdet_pd(identity_plus(ch.H_E * k.matrix() * ch.H_E.adjoint()));
  return joint_term - eve_term;
}

double tilde_bform(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a) {
  const HermMatrix b = B_of_A(ch, a);
  const Matrix khalf = sqrt_psd(k).matrix();
  const double b_term = logdet_pd(identity_plus(khalf * b.matrix() * khalf));
  const double eve_term = logdet_pd(identity_plus(ch.H_E * k.matrix() * ch.H_E.adjoint()));
  return b_term - eve_term;
}

double tilde_schur(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a) {
  const HermMatrix gap = feasible_gap(a);
  const Matrix cross = ch.H_M * k.matrix() * ch.H_E.adjoint() + a;
  const HermMatrix kz = identity_plus(ch.H_E * k.matrix() * ch.H_E.adjoint());
  const HermMatrix schur = HermMatrix::symmetrized(
      Matrix::identity(ch.n_M()) + ch.H_M * k.matrix() * ch.H_M.adjoint() -
      cross * inv_pd(kz).matrix() * cross.adjoint());
  return logdet_pd(schur) - logdet_pd(gap);
}

double tilde_raw(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a) {
  feasible_gap(a);
  const std::size_t nm = ch.n_M(), ne = ch.n_E();
  Matrix kyz(nm + ne, nm + ne);
  kyz.set_block(0, 0, Matrix::identity(nm) + ch.H_M * k.matrix() * ch.H_M.adjoint());
  const Matrix cross = ch.H_M * k.matrix() * ch.H_E.adjoint() + a;
  kyz.set_block(0, nm, cross);
  kyz.set_block(nm, 0, cross.adjoint());
  kyz.set_block(nm, nm, Matrix::identity(ne) + ch.H_E * k.matrix() * ch.H_E.adjoint());
  const double det_yz = logdet_pd(HermMatrix::symmetrized(kyz));
  const double det_z = logdet_pd(identity_plus(ch.H_E * k.matrix() * ch.H_E.adjoint()));
  const double det_me = logdet_pd(HermMatrix::symmetrized(assemble_kme(ch, a)));
  return det_yz - det_z - det_me;  // logdet(K_E) = 0 since K_E = I
}

}  // namespace

double tilde_I(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a,
               TildeForm form) {
  check_shapes(ch, k);
  check_shapes(ch, a);
  switch (form) {
    case TildeForm::JOINT: return tilde_joint(ch, k, a);
    case TildeForm::BFORM: return tilde_bform(ch, k, a);
    case TildeForm::SCHUR: return tilde_schur(ch, k, a);
    case TildeForm::RAW: return tilde_raw(ch, k, a);
  }
  throw NumericalFailure("tilde_I: unreachable");
}

double tilde_I(const WiretapChannel& ch, const InputCovariance& k,
               const NoiseCorrelation& a, TildeForm form) {
  return tilde_I(ch, k.K(), a.A(), form);
}

HermMatrix tilde_I_grad_K(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a) {
  check_shapes(ch, k);
  const HermMatrix b = B_of_A(ch, a);
  const HermMatrix first = inv_pd(herm_add(inv_pd(b), k));
  const HermMatrix second = inv_pd(herm_add(inv_pd(ch.gram_eve()), k));
  return herm_sub(first, second);
}

// ---------------------------------------------------------------------------
// Gaussian entropy identities
// ---------------------------------------------------------------------------

double gaussian_entropy(const HermMatrix& k) {
  return static_cast<double>(k.dim()) * kLogPiE + logdet_pd(k);
}

HermMatrix conditional_cov_U(const HermMatrix& k_joint) {
  const std::size_t two_m = k_joint.dim();
  if (two_m == 0 || two_m % 2 != 0)
    throw DimensionMismatch("conditional_cov_U: joint covariance must stack two equal blocks");
  const std::size_t m = two_m / 2;
  if (min_eig_herm(k_joint) <= pd_threshold(k_joint))
    throw NotPositiveDefinite("conditional_cov_U: joint covariance not PD");

  // Congruence with (1/sqrt2) [[I, -I], [I, I]]: rows become (A-B)/sqrt2, (A+B)/sqrt2.
  Matrix t(two_m, two_m);
  const double inv_sqrt2 = std::sqrt(0.5);
  for (std::size_t i = 0; i < m; ++i) {
    t(i, i) = inv_sqrt2;
    t(i, m + i) = -inv_sqrt2;
    t(m + i, i) = inv_sqrt2;
    t(m + i, m + i) = inv_sqrt2;
  }
  const HermMatrix rotated = HermMatrix::symmetrized(t * k_joint.matrix() * t.adjoint());
  const HermMatrix c11 = HermMatrix::symmetrized(rotated.matrix().block(0, 0, m, m));
  const Matrix c21 = rotated.matrix().block(m, 0, m, m);
  const HermMatrix c22 = HermMatrix::symmetrized(rotated.matrix().block(m, m, m, m));
  if (min_eig_herm(c11) <= pd_threshold(c11))
    throw NotPositiveDefinite("conditional_cov_U: difference block degenerate");
  return HermMatrix::symmetrized(c22.matrix() - c21 * inv_pd(c11).matrix() * c21.adjoint());
}

double entropy_decomposition_check(const HermMatrix& k_joint, const HermMatrix& k_x) {
  const std::size_t two_m = k_joint.dim();
  if (two_m == 0 || two_m % 2 != 0)
    throw DimensionMismatch("entropy_decomposition_check: joint covariance must be even");
  const std::size_t m = two_m / 2;
  if (k_x.dim() != m) throw DimensionMismatch("entropy_decomposition_check: K_X must be m x m");

  // Left side: h(X+A, X+B), covariance K_joint + (I;I) K_X (I;I)*.
  Matrix lift(two_m, m);
  lift.set_block(0, 0, Matrix::identity(m));
  lift.set_block(m, 0, Matrix::identity(m));
  const HermMatrix lhs_cov =
      HermMatrix::symmetrized(k_joint.matrix() + lift * k_x.matrix() * lift.adjoint());
  const double lhs = gaussian_entropy(lhs_cov);

  // Right side: h(sqrt2 X + U) + h((A-B)/sqrt2).
  const HermMatrix k_u = conditional_cov_U(k_joint);
  const HermMatrix k_aa = HermMatrix::symmetrized(k_joint.matrix().block(0, 0, m, m));
  const HermMatrix k_bb = HermMatrix::symmetrized(k_joint.matrix().block(m, m, m, m));
  const Matrix k_ab = k_joint.matrix().block(0, m, m, m);
  const HermMatrix diff_cov = HermMatrix::symmetrized(
      0.5 * (k_aa.matrix() - k_ab - k_ab.adjoint() + k_bb.matrix()));
  const HermMatrix sum_cov = HermMatrix::symmetrized(2.0 * k_x.matrix() + k_u.matrix());
  const double rhs = gaussian_entropy(sum_cov) + gaussian_entropy(diff_cov);
  return std::abs(lhs - rhs);
}

}  // namespace wiretap
