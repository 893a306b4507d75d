#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "wiretap/channel.hpp"
#include "wiretap/objective.hpp"

using namespace wiretap;
using wiretap::testing::random_matrix;
using wiretap::testing::random_psd_rank;

namespace {

WiretapChannel scalar_channel(double h_m, double h_e, double p = 1.0) {
  WiretapChannel ch;
  ch.H_M = Matrix::from_real({{h_m}});
  ch.H_E = Matrix::from_real({{h_e}});
  ch.P = p;
  return ch;
}

// Random A with operator norm target in (0, 0.9]; always strictly feasible.
Matrix random_feasible_A(Rng& rng, std::size_t n_m, std::size_t n_e) {
  Matrix a = random_matrix(rng, n_m, n_e);
  const double top = singular_values(a).back();
  const double target = 0.1 + 0.8 * rng.uniform();
  return a * (target / std::max(top, 1e-12));
}

const std::array<TildeForm, 4> kForms = {TildeForm::JOINT, TildeForm::BFORM,
                                         TildeForm::SCHUR, TildeForm::RAW};

}  // namespace

TEST_CASE("secrecy_rate closed forms") {
  const WiretapChannel sc = scalar_channel(std::sqrt(2.0), 1.0);
  CHECK(secrecy_rate(sc, HermMatrix::zero(1)) == doctest::Approx(0.0));
  CHECK(secrecy_rate(sc, HermMatrix::diag({1.0})) ==
        doctest::Approx(std::log(3.0) - std::log(2.0)).epsilon(1e-12));

  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    WiretapChannel eq;
    eq.H_M = random_matrix(rng, 3, 2);
    eq.H_E = eq.H_M;
    eq.P = 1.0;
    const HermMatrix k = random_psd_rank(rng, 2, 2, 1.0);
    CHECK(std::abs(secrecy_rate(eq, k)) <= 1e-12);
  }
}

TEST_CASE("secrecy_grad closed forms and the PD-route identity") {
  const WiretapChannel sc = scalar_channel(std::sqrt(2.0), 1.0);
  const HermMatrix g = secrecy_grad(sc, HermMatrix::diag({1.0}));
  CHECK(g(0, 0).real() == doctest::Approx(2.0 / 3.0 - 0.5).epsilon(1e-12));

  Rng rng(32);
  for (int rep = 0; rep < 10; ++rep) {
    WiretapChannel eq;
    eq.H_M = random_matrix(rng, 2, 2);
    eq.H_E = eq.H_M;
    eq.P = 1.0;
    const HermMatrix k = random_psd_rank(rng, 2, 2, 1.0);
    CHECK(secrecy_grad(eq, k).frobenius_norm() <= 1e-12);
  }

  // For K strictly PD the resolvent form matches.
  for (int rep = 0; rep < 10; ++rep) {
    const WiretapChannel ch = random_channel(800 + rep, 2, 3, 2, 1.0);
    const HermMatrix k = wiretap::testing::random_pd(rng, 2, 0.2);
    const HermMatrix direct = secrecy_grad(ch, k);
    const HermMatrix via_resolvent =
        herm_sub(inv_pd(herm_add(inv_pd(ch.gram_main()), k)),
                 inv_pd(herm_add(inv_pd(ch.gram_eve()), k)));
    CHECK((direct.matrix() - via_resolvent.matrix()).frobenius_norm() <=
          1e-9 * std::max(1.0, via_resolvent.frobenius_norm()));
  }
}

TEST_CASE("secrecy_grad matches finite differences") {
  Rng rng(33);
  int checked = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 1 + rng.integer(3);
    const WiretapChannel ch = random_channel(900 + rep, n, n + 1, n, 1.0);
    const HermMatrix k = wiretap::testing::random_pd(rng, n, 0.3);
    const HermMatrix g = secrecy_grad(ch, k);
    for (int dir = 0; dir < 10; ++dir) {
      HermMatrix delta = wiretap::testing::random_hermitian(rng, n);
      delta = herm_scale(delta, 1.0 / std::max(delta.frobenius_norm(), 1e-12));
      const double t = 1e-5;
      const double fp = secrecy_rate(ch, herm_add(k, herm_scale(delta, t)));
      const double fm = secrecy_rate(ch, herm_add(k, herm_scale(delta, -t)));
      const double fd = (fp - fm) / (2.0 * t);
      const double ip = (g.matrix() * delta.matrix()).trace().real();
      CHECK(std::abs(fd - ip) <= 1e-5 * std::max({std::abs(fd), std::abs(ip), 1e-6}));
      ++checked;
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("B_of_A plug-in values") {
  const WiretapChannel sc = scalar_channel(std::sqrt(2.0), 1.0);

  const HermMatrix at_zero = B_of_A(sc, Matrix::from_real({{0.0}}));
  CHECK(at_zero(0, 0).real() == doctest::Approx(3.0).epsilon(1e-12));  // G_M + G_E

  const HermMatrix degraded = B_of_A(sc, Matrix::from_real({{std::sqrt(2.0) / 2.0}}));
  CHECK(degraded(0, 0).real() == doctest::Approx(2.0).epsilon(1e-12));  // = H_M*H_M

  // EVE closed form makes the B matrix collapse onto H_E*H_E exactly.
  for (int rep = 0; rep < 10; ++rep) {
    const WiretapChannel ch =
        random_channel(700 + rep, 2, 2, 2, 1.0, ChannelClass::DEGRADED_EVE);
    const Matrix a_star = ch.H_E * inv_pd(ch.gram_eve()).matrix() * ch.H_M.adjoint();
    const HermMatrix b = B_of_A(ch, a_star.adjoint());
    CHECK((b.matrix() - ch.gram_eve().matrix()).frobenius_norm() <=
          1e-10 * std::max(1.0, ch.gram_eve().frobenius_norm()));
  }
}

TEST_CASE("B_of_A rejects infeasible correlations") {
  const WiretapChannel sc = scalar_channel(1.0, 1.0);
  CHECK_THROWS_AS(B_of_A(sc, Matrix::from_real({{1.0}})), CorrelationInfeasible);
  CHECK_THROWS_AS(NoiseCorrelation::make(Matrix::from_real({{1.0 - 1e-13}})),
                  CorrelationInfeasible);
  CHECK(NoiseCorrelation::try_make(Matrix::from_real({{0.5}})).has_value());
}

TEST_CASE("tilde_I scalar plug-ins") {
  const WiretapChannel sc = scalar_channel(std::sqrt(2.0), 1.0);
  const HermMatrix k = HermMatrix::diag({1.0});
  const Matrix a = Matrix::from_real({{std::sqrt(2.0) / 2.0}});
  const double want = std::log(3.0) - std::log(2.0);
  for (TildeForm form : kForms) {
    CHECK(tilde_I(sc, k, a, form) == doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("tilde_I with A = 0 reduces to the block-diagonal-noise value") {
  Rng rng(35);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 1 + rng.integer(2);
    const WiretapChannel ch = random_channel(600 + rep, n, n, n, 1.0);
    const HermMatrix k = random_psd_rank(rng, n, n, 0.7);
    const Matrix a0(ch.n_M(), ch.n_E());
    const HermMatrix joint_gram = herm_add(ch.gram_main(), ch.gram_eve());
    const Matrix khalf = sqrt_psd(k).matrix();
    const double direct =
        logdet_pd(HermMatrix::symmetrized(Matrix::identity(n) +
                                          khalf * joint_gram.matrix() * khalf)) -
        logdet_pd(HermMatrix::symmetrized(Matrix::identity(ch.n_E()) +
                                          ch.H_E * k.matrix() * ch.H_E.adjoint()));
    CHECK(tilde_I(ch, k, a0, TildeForm::JOINT) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("all four tilde_I forms agree on random triples") {
  Rng rng(36);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.integer(3);
    const std::size_t nm = n + rng.integer(2);
    const std::size_t ne = n + rng.integer(2);
    const WiretapChannel ch = random_channel(10'000 + rep, n, nm, ne, 1.0);
    const HermMatrix k = random_psd_rank(rng, n, 1 + rng.integer(n), rng.uniform(0.1, 1.0));
    const Matrix a = random_feasible_A(rng, nm, ne);
    double vals[4];
    for (std::size_t f = 0; f < 4; ++f) vals[f] = tilde_I(ch, k, a, kForms[f]);
    for (std::size_t f = 1; f < 4; ++f) {
      CHECK(wiretap::testing::rel_err(vals[f], vals[0]) <= 1e-9);
    }
  }
}

TEST_CASE("tilde_I upper bounds the secrecy rate for every feasible A") {
  Rng rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.integer(2);
    const WiretapChannel ch = random_channel(20'000 + rep, n, n, n, 1.0);
    const HermMatrix k = random_psd_rank(rng, n, 1 + rng.integer(n), rng.uniform(0.1, 1.0));
    const Matrix a = random_feasible_A(rng, n, n);
    CHECK(tilde_I(ch, k, a, TildeForm::BFORM) >= secrecy_rate(ch, k) - 1e-9);
  }
}

TEST_CASE("tilde_I is concave in K and convex in A along midpoints") {
  Rng rng(38);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.integer(2);
    const WiretapChannel ch = random_channel(30'000 + rep, n, n, n, 1.0);
    const Matrix a = random_feasible_A(rng, n, n);
    const HermMatrix k1 = random_psd_rank(rng, n, 1 + rng.integer(n), rng.uniform(0.05, 1.0));
    const HermMatrix k2 = random_psd_rank(rng, n, 1 + rng.integer(n), rng.uniform(0.05, 1.0));
    const HermMatrix mid = herm_scale(herm_add(k1, k2), 0.5);
    const double lhs = tilde_I(ch, mid, a, TildeForm::JOINT);
    const double rhs =
        0.5 * tilde_I(ch, k1, a, TildeForm::JOINT) + 0.5 * tilde_I(ch, k2, a, TildeForm::JOINT);
    CHECK(lhs >= rhs - 1e-9);

    const Matrix a1 = random_feasible_A(rng, n, n);
    const Matrix a2 = random_feasible_A(rng, n, n);
    const Matrix amid = (a1 + a2) * 0.5;
    const HermMatrix k = random_psd_rank(rng, n, n, rng.uniform(0.05, 1.0));
    const double lhs_a = tilde_I(ch, k, amid, TildeForm::JOINT);
    const double rhs_a =
        0.5 * tilde_I(ch, k, a1, TildeForm::JOINT) + 0.5 * tilde_I(ch, k, a2, TildeForm::JOINT);
    CHECK(lhs_a <= rhs_a + 1e-9);
  }
}

TEST_CASE("gradient order property from the B matrix") {
  Rng rng(39);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.integer(2);
    const WiretapChannel ch = random_channel(40'000 + rep, n, n, n, 1.0);
    const Matrix a = random_feasible_A(rng, n, n);
    const HermMatrix k = wiretap::testing::random_pd(rng, n, 0.05);
    const HermMatrix g = tilde_I_grad_K(ch, k, a);
    const double scale = std::max(g.frobenius_norm(), 1.0);
    CHECK(min_eig_herm(g) >= -tol::rank * scale);
  }
}

TEST_CASE("gaussian_entropy values and scaling") {
  const double log_pi_e = std::log(3.141592653589793238462643 * std::exp(1.0));
  CHECK(gaussian_entropy(HermMatrix::identity(1)) == doctest::Approx(log_pi_e).epsilon(1e-12));
  CHECK(gaussian_entropy(HermMatrix::diag({1.0, 1.0})) ==
        doctest::Approx(2.0 * log_pi_e).epsilon(1e-12));
  Rng rng(40);
  const HermMatrix k = wiretap::testing::random_pd(rng, 3);
  const double c = 2.5;
  CHECK(gaussian_entropy(herm_scale(k, c)) - gaussian_entropy(k) ==
        doctest::Approx(3.0 * std::log(c)).epsilon(1e-10));
  CHECK_THROWS_AS(gaussian_entropy(HermMatrix::diag({1.0, 0.0})), NotPositiveDefinite);
}

TEST_CASE("conditional_cov_U independent case and degenerate joint") {
  // Independent A, B with identity covariances: cross terms vanish, K_U = I.
  const HermMatrix joint = HermMatrix::identity(4);
  const HermMatrix k_u = conditional_cov_U(joint);
  CHECK((k_u.matrix() - Matrix::identity(2)).frobenius_norm() <= 1e-12);

  // B = A makes the difference block degenerate.
  Rng rng(41);
  const HermMatrix k_a = wiretap::testing::random_pd(rng, 2);
  Matrix singular(4, 4);
  singular.set_block(0, 0, k_a.matrix());
  singular.set_block(0, 2, k_a.matrix());
  singular.set_block(2, 0, k_a.matrix());
  singular.set_block(2, 2, k_a.matrix());
  CHECK_THROWS_AS(conditional_cov_U(HermMatrix::symmetrized(singular)), NotPositiveDefinite);

  CHECK_THROWS_AS(conditional_cov_U(HermMatrix::identity(3)), DimensionMismatch);
}

TEST_CASE("entropy decomposition identity") {
  Rng rng(42);

  // K_X = 0: pure unitary rotation of (A, B).
  {
    const HermMatrix joint = wiretap::testing::random_pd(rng, 4);
    CHECK(entropy_decomposition_check(joint, HermMatrix::zero(2)) <= 1e-10);
  }

  // Independent standard A, B with K_X = I.
  CHECK(entropy_decomposition_check(HermMatrix::identity(4), HermMatrix::identity(2)) <= 1e-8);

  // Monte-Carlo sweep.
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 1 + rng.integer(3);
    const HermMatrix joint = wiretap::testing::random_pd(rng, 2 * m);
    const HermMatrix k_x = random_psd_rank(rng, m, 1 + rng.integer(m), rng.uniform(0.0, 2.0));
    worst = std::max(worst, entropy_decomposition_check(joint, k_x));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("InputCovariance clips boundary noise and rejects real negativity") {
  const HermMatrix noisy = HermMatrix::diag({1.0, -1e-12});
  const InputCovariance k = InputCovariance::make(noisy);
  CHECK(min_eig_herm(k.K()) >= 0.0);
  CHECK(k.trace() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(InputCovariance::make(HermMatrix::diag({1.0, -0.1})), NotPositiveDefinite);
}
