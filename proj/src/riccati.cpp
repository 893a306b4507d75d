#include "wiretap/riccati.hpp"

#include <cmath>

#include "wiretap/rng.hpp"

namespace wiretap {

namespace {

HermMatrix b_resolvent(const WiretapChannel& ch, const HermMatrix& k) {
  return inv_pd(HermMatrix::symmetrized(Matrix::identity(ch.n_M()) +
                                        ch.H_M * k.matrix() * ch.H_M.adjoint()));
}

double feasibility_floor(const HermMatrix& gap) {
  return std::max(pd_threshold(gap), tol::pd);
}

void fill_feasibility(RiccatiSolution& sol) {
  const HermMatrix gap = HermMatrix::symmetrized(
      Matrix::identity(sol.A.rows()) - sol.A * sol.A.adjoint());
  sol.feasibility_margin = min_eig_herm(gap);
  sol.feasible = sol.feasibility_margin > feasibility_floor(gap);
}

// Rank split of K at the tolerance used throughout: tol::rank * scale with the
// power budget as the scale.
std::pair<Matrix, std::size_t> ux_factor(const WiretapChannel& ch, const HermMatrix& k) {
  const EigenH e = eig_herm(k);
  const std::size_t n = k.dim();
  const double thr = tol::rank * std::max({ch.P, k.trace_real(), 1.0});
  std::size_t r = 0;
  for (double lam : e.values)
    if (lam > thr) ++r;
  Matrix ux(n, r);
  std::size_t c = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (e.values[j] <= thr) continue;
    const double root = std::sqrt(e.values[j]);
    for (std::size_t i = 0; i < n; ++i) ux(i, c) = e.vectors(i, j) * root;
    ++c;
  }
  return {ux, r};
}

}  // namespace

RiccatiProblem build_M(const WiretapChannel& ch, const HermMatrix& k) {
  if (k.dim() != ch.n()) throw DimensionMismatch("build_M: K must be n x n");
  const std::size_t nm = ch.n_M(), ne = ch.n_E();
  const Matrix b1 = b_resolvent(ch, k).matrix();
  const Matrix hmk_he = ch.H_M * k.matrix() * ch.H_E.adjoint();   // n_M x n_E
  const Matrix hek_hm = ch.H_E * k.matrix() * ch.H_M.adjoint();   // n_E x n_M
  const Matrix hek_he = ch.H_E * k.matrix() * ch.H_E.adjoint();   // n_E x n_E

  RiccatiProblem prob;
  prob.channel = ch;
  prob.K = k;
  prob.M11 = -b1;
  prob.M12 = -(b1 * hmk_he);
  prob.M21 = hek_hm * b1;
  prob.M22 = -hek_he - Matrix::identity(ne) + hek_hm * b1 * hmk_he;
  prob.M = Matrix(nm + ne, nm + ne);
  prob.M.set_block(0, 0, prob.M11);
  prob.M.set_block(0, nm, prob.M12);
  prob.M.set_block(nm, 0, prob.M21);
  prob.M.set_block(nm, nm, prob.M22);
  prob.F = Matrix::identity(nm + ne);
  prob.F.set_block(0, 0, Matrix::identity(nm) + ch.H_M * k.matrix() * ch.H_M.adjoint());
  return prob;
}

double riccati_residual(const WiretapChannel& ch, const HermMatrix& k, const Matrix& a) {
  if (a.rows() != ch.n_M() || a.cols() != ch.n_E())
    throw DimensionMismatch("riccati_residual: A must be n_M x n_E");
  const RiccatiProblem prob = build_M(ch, k);
  const Matrix a_star = a.adjoint();
  const Matrix poly =
      prob.M21 + prob.M22 * a_star - a_star * prob.M11 - a_star * prob.M12 * a_star;
  return poly.frobenius_norm();
}

Matrix eigenspace_minus_one(const RiccatiProblem& prob) {
  const Matrix shifted = prob.M + Matrix::identity(prob.M.rows());
  const double scale = std::max(shifted.frobenius_norm(), 1.0);
  return kernel_basis(shifted, tol::rank * scale);
}

Matrix jordan_J(const WiretapChannel& ch, const HermMatrix& k) {
  const Matrix b1 = b_resolvent(ch, k).matrix();
  const Matrix inner = ch.H_M * k.matrix() * ch.H_E.adjoint() * ch.H_E *
                           inv_pd(ch.gram_main()).matrix() * ch.H_M.adjoint() +
                       Matrix::identity(ch.n_M());
  return -(b1 * inner);
}

RiccatiSolution solve_A_degraded(const WiretapChannel& ch, DegradedForm which,
                                 const std::optional<HermMatrix>& k) {
  const ChannelClass cls = classify(ch);
  if (which == DegradedForm::MAIN && cls != ChannelClass::DEGRADED_MAIN)
    throw WrongChannelClass("solve_A_degraded: MAIN form needs a DEGRADED_MAIN channel, got " +
                            std::string(to_string(cls)));
  if (which == DegradedForm::EVE && cls != ChannelClass::DEGRADED_EVE)
    throw WrongChannelClass("solve_A_degraded: EVE form needs a DEGRADED_EVE channel, got " +
                            std::string(to_string(cls)));

  const HermMatrix gram =
      which == DegradedForm::MAIN ? ch.gram_main() : ch.gram_eve();
  RiccatiSolution sol;
  const Matrix a_star = ch.H_E * inv_pd(gram).matrix() * ch.H_M.adjoint();
  sol.A = a_star.adjoint();
  if (which == DegradedForm::MAIN) {
    sol.V = Matrix::identity(ch.n_M());
    sol.W = Matrix(ch.n_M(), 0);
  } else {
    sol.V = Matrix(0, 0);
    sol.W = Matrix::identity(ch.n_M());
  }
  const HermMatrix k_eval = k.value_or(
      herm_scale(HermMatrix::identity(ch.n()), ch.P / static_cast<double>(ch.n())));
  sol.residual = riccati_residual(ch, k_eval, sol.A);
  fill_feasibility(sol);
  return sol;
}

RiccatiSolution solve_A_lowrank(const WiretapChannel& ch, const HermMatrix& k,
                                const Matrix& v, const Matrix& w) {
  validate(ch);
  const std::size_t n = ch.n(), nm = ch.n_M();
  if (k.dim() != n) throw DimensionMismatch("solve_A_lowrank: K must be n x n");
  const auto [ux, r] = ux_factor(ch, k);
  if (r >= n) throw InvalidMatrix("solve_A_lowrank: K must be rank deficient");
  if (v.rows() != r || v.cols() != r)
    throw DimensionMismatch("solve_A_lowrank: V must be r x r with r = rank(K)");
  if (w.rows() != nm || w.cols() != nm - r)
    throw DimensionMismatch("solve_A_lowrank: W must be n_M x (n_M - r)");

  const HermMatrix k_clean = HermMatrix::symmetrized(ux * ux.adjoint());
  const Matrix b = b_resolvent(ch, k_clean).matrix();
  const Matrix basis_v = b * ch.H_M * ux * v;  // n_M x r
  const Matrix stacked = Matrix::hcat(basis_v, w);
  if (!(cond2(stacked) < tol::cond_guard))
    throw SingularBasis("solve_A_lowrank: stacked (B H_M U_X V, W) basis not invertible");

  const Matrix main_part = ch.H_E * inv_pd(ch.gram_main()).matrix() * ch.H_M.adjoint();
  const Matrix eve_part = ch.H_E * inv_pd(ch.gram_eve()).matrix() * ch.H_M.adjoint();
  const Matrix numer = Matrix::hcat(main_part * basis_v, eve_part * w);
  Matrix a_star;
  try {
    a_star = numer * inverse_lu(stacked);
  } catch (const SingularMatrix&) {
    throw SingularBasis("solve_A_lowrank: stacked basis numerically singular");
  }

  RiccatiSolution sol;
  sol.A = a_star.adjoint();
  sol.V = v;
  sol.W = w;
  sol.U_X = ux;
  const Matrix j = jordan_J(ch, k_clean);
  sol.Q = kernel_basis(j + Matrix::identity(nm),
                       tol::rank * std::max(j.frobenius_norm(), 1.0));
  sol.residual = riccati_residual(ch, k_clean, sol.A);
  fill_feasibility(sol);
  return sol;
}

RiccatiSolution feasibility_search(const WiretapChannel& ch, const HermMatrix& k,
                                   std::uint64_t seed, int tries) {
  validate(ch);
  const std::size_t n = ch.n(), nm = ch.n_M();
  const auto [ux, r] = ux_factor(ch, k);
  if (r >= n) throw InvalidMatrix("feasibility_search: K must be rank deficient");
  const std::size_t w_cols = nm - r;

  // Positive directions of I - H_M (H_E*H_E)^{-1} H_M*; the W block of the
  // feasibility criterion must live there.
  const HermMatrix d2 = HermMatrix::symmetrized(
      Matrix::identity(nm) - ch.H_M * inv_pd(ch.gram_eve()).matrix() * ch.H_M.adjoint());
  const EigenH ed2 = eig_herm(d2);
  const double dead = tol::rank * std::max(d2.frobenius_norm(), 1.0);
  std::size_t pos = 0;
  for (double lam : ed2.values)
    if (lam > dead) ++pos;
  Matrix positive_dirs(nm, pos);
  for (std::size_t c = 0; c < pos; ++c)
    positive_dirs.set_block(0, c, ed2.vectors.col(nm - pos + c));

  Rng rng(seed);
  const double scales[] = {1.0, 0.5, 2.0, 0.25, 4.0};
  std::string last_failure = "no candidate attempted";
  for (int attempt = 0; attempt < tries; ++attempt) {
    Matrix v = Matrix::identity(r) * scales[attempt % 5];
    Matrix w(nm, w_cols);
    if (attempt == 0 && pos >= w_cols) {
      // Deterministic first guess: the strongest positive directions.
      for (std::size_t c = 0; c < w_cols; ++c)
        w.set_block(0, c, positive_dirs.col(pos - 1 - c));
    } else if (pos >= w_cols && attempt % 4 != 3) {
      Matrix mix(pos, w_cols);
      for (std::size_t i = 0; i < pos; ++i)
        for (std::size_t j = 0; j < w_cols; ++j) mix(i, j) = rng.complex_normal();
      w = positive_dirs * mix;
    } else {
      for (std::size_t i = 0; i < nm; ++i)
        for (std::size_t j = 0; j < w_cols; ++j) w(i, j) = rng.complex_normal();
    }
    try {
      RiccatiSolution sol = solve_A_lowrank(ch, k, v, w);
      if (sol.feasible && sol.residual <= tol::identity_residual) return sol;
      last_failure = sol.feasible ? "residual above tolerance"
                                  : "I - AA* not strictly positive definite";
    } catch (const SingularBasis&) {
      last_failure = "stacked basis singular";
    }
  }
  throw FeasibleNotFound("feasibility_search: " + std::to_string(tries) +
                         " tries exhausted (" + last_failure + ")");
}

}  // namespace wiretap
