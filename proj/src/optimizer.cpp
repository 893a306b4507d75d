#include "wiretap/optimizer.hpp"

#include <cmath>

#include "wiretap/rng.hpp"

namespace wiretap {

// ---------------------------------------------------------------------------
// Projected gradient ascent
// ---------------------------------------------------------------------------

AscentResult ascend_projected(const std::function<double(const HermMatrix&)>& f,
                              const std::function<HermMatrix(const HermMatrix&)>& grad,
                              const HermMatrix& start, double power,
                              const OptimizerOptions& opts,
                              std::vector<double>* value_trace) {
  HermMatrix k = project_psd_trace(start, power);
  double fk = f(k);
  if (value_trace) value_trace->push_back(fk);
  AscentResult out;
  out.converged = false;
  std::size_t it = 0;
  int plateau = 0;
  for (; it < opts.max_iters; ++it) {
    const HermMatrix g = grad(k);
    // Gradient mapping at unit probe step: zero iff k is stationary.
    const HermMatrix probe = project_psd_trace(herm_add(k, g), power);
    if ((probe.matrix() - k.matrix()).frobenius_norm() <= opts.tol_grad) {
      out.converged = true;
      break;
    }
    double step = opts.step0;
    bool accepted = false;
    HermMatrix k_next;
    double f_next = fk;
    for (int halving = 0; halving < 70; ++halving) {
      const HermMatrix kt = project_psd_trace(herm_add(k, herm_scale(g, step)), power);
      const Matrix move = kt.matrix() - k.matrix();
      if (move.frobenius_norm() <= 1e-18) break;  // pinned against the feasible set
      const double dir = (g.matrix() * move).trace().real();
      const double ft = f(kt);
      if (dir > 0.0 && ft >= fk + 1e-4 * dir) {
        accepted = true;
        k_next = kt;
        f_next = ft;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent step exists at representable lengths
    const double gain = f_next - fk;
    k = k_next;
    fk = f_next;
    if (value_trace) value_trace->push_back(fk);
    // The value criterion is a plateau safeguard; a single tiny gain is not
    // yet stagnation, so it must persist before we stop on it.
    plateau = gain <= opts.tol_value ? plateau + 1 : 0;
    if (plateau >= 25) {
      ++it;
      out.converged = true;
      break;
    }
  }
  out.K = k;
  out.value = fk;
  out.iterations = it;
  return out;
}

// ---------------------------------------------------------------------------
// maximize_secrecy
// ---------------------------------------------------------------------------

std::size_t rank_of(const HermMatrix& k, double scale) {
  const EigenH e = eig_herm(k);
  std::size_t r = 0;
  for (double lam : e.values)
    if (lam > tol::rank * scale) ++r;
  return r;
}

double multiplier_estimate(const WiretapChannel& ch, const HermMatrix& k) {
  const double tr = k.trace_real();
  if (tr <= tol::rank) return 0.0;
  const HermMatrix g = secrecy_grad(ch, k);
  return (g.matrix() * k.matrix()).trace().real() / tr;
}

namespace {

std::vector<HermMatrix> build_starts(const WiretapChannel& ch, const OptimizerOptions& opts) {
  const std::size_t n = ch.n();
  std::vector<HermMatrix> starts;
  starts.push_back(herm_scale(HermMatrix::identity(n), ch.P / static_cast<double>(n)));
  // Full power along the best direction of the Gram difference; a good seed
  // in the low-power regime and harmless otherwise.
  const EigenH gap = eig_herm(herm_sub(ch.gram_main(), ch.gram_eve()));
  const Matrix v = gap.vectors.col(n - 1);
  starts.push_back(HermMatrix::symmetrized(v * v.adjoint() * ch.P));
  Rng rng(opts.seed);
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    Matrix x(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) x(i, j) = rng.complex_normal();
    HermMatrix k = HermMatrix::symmetrized(x * x.adjoint());
    const double u = std::max(rng.uniform(), 0.05);
    k = herm_scale(k, u * ch.P / std::max(k.trace_real(), 1e-12));
    starts.push_back(k);
  }
  return starts;
}

}  // namespace

Optimum maximize_secrecy(const WiretapChannel& ch, const OptimizerOptions& opts) {
  validate(ch);
  const auto f = [&](const HermMatrix& k) { return secrecy_rate(ch, k); };
  const auto g = [&](const HermMatrix& k) { return secrecy_grad(ch, k); };

  AscentResult best;
  bool have_best = false;
  for (const HermMatrix& start : build_starts(ch, opts)) {
    const AscentResult run = ascend_projected(f, g, start, ch.P, opts);
    // Ties resolved by start order: strictly-better-only keeps the earliest.
    if (!have_best || run.value > best.value + 1e-12) {
      best = run;
      have_best = true;
    }
  }

  Optimum out;
  if (best.value <= 0.0) {
    // K = 0 is feasible with value exactly 0; the capacity is never negative.
    out.K_star = InputCovariance::make(HermMatrix::zero(ch.n()));
    out.value = 0.0;
    out.iterations = best.iterations;
    out.converged = true;
  } else {
    out.K_star = InputCovariance::make(best.K);
    out.value = best.value;
    out.iterations = best.iterations;
    out.converged = best.converged;
  }
  out.trace = out.K_star.trace();
  out.rank = rank_of(out.K_star.K(), ch.P);
  out.multiplier_estimate = multiplier_estimate(ch, out.K_star.K());
  return out;
}

// ---------------------------------------------------------------------------
// KKT residual
// ---------------------------------------------------------------------------

double kkt_residual(const WiretapChannel& ch, const InputCovariance& k, double lambda) {
  const std::size_t n = ch.n();
  const HermMatrix g = secrecy_grad(ch, k.K());
  const HermMatrix d = herm_sub(g, herm_scale(HermMatrix::identity(n), lambda));
  const EigenH e = eig_herm(k.K());
  const double thr = tol::rank * std::max(k.trace(), 1e-12);

  // Columns of the eigenbasis, split into kernel (leading, ascending order)
  // and range.
  std::size_t kernel_dim = 0;
  while (kernel_dim < n && e.values[kernel_dim] <= thr) ++kernel_dim;
  const Matrix basis = e.vectors;
  const Matrix dt = basis.adjoint() * d.matrix() * basis;

  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool i_range = i >= kernel_dim;
      const bool j_range = j >= kernel_dim;
      if (i_range || j_range) sq += std::norm(dt(i, j));
    }
  }
  if (kernel_dim > 0) {
    const HermMatrix d00 =
        HermMatrix::symmetrized(dt.block(0, 0, kernel_dim, kernel_dim));
    for (double lam : eig_herm(d00).values)
      if (lam > 0.0) sq += lam * lam;
  }
  return std::sqrt(sq);
}

double kkt_residual(const WiretapChannel& ch, const InputCovariance& k) {
  return kkt_residual(ch, k, multiplier_estimate(ch, k.K()));
}

// ---------------------------------------------------------------------------
// oracle_search
// ---------------------------------------------------------------------------

namespace {

// log|det| through LU pivots; the oracle's own route, separate from the
// eigendecomposition path used by secrecy_rate.
double log_abs_det(Matrix m) {
  const std::size_t n = m.rows();
  double out = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > best) best = std::abs(m(i, k)), piv = i;
    if (best <= 0.0) return -1e300;
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(k, j));
    out += std::log(std::abs(m(k, k)));
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex l = m(i, k) / m(k, k);
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return out;
}

struct OracleEvaluator {
  const Matrix gm, ge;  // Gram matrices
  std::size_t n;

  explicit OracleEvaluator(const WiretapChannel& ch)
      : gm(ch.gram_main().matrix()), ge(ch.gram_eve().matrix()), n(ch.n()) {}

  // det(I + H K H*) = det(I + K G) by the determinant identity.
  double rate(const Matrix& k) const {
    return log_abs_det(Matrix::identity(n) + k * gm) -
           log_abs_det(Matrix::identity(n) + k * ge);
  }
};

}  // namespace

double oracle_search(const WiretapChannel& ch, std::size_t budget, std::uint64_t seed) {
  validate(ch);
  const std::size_t n = ch.n();
  const double power = ch.P;
  const OracleEvaluator eval(ch);
  Rng rng(seed);

  double best = 0.0;  // K = 0
  Matrix best_k(n, n);
  const auto consider = [&](const Matrix& k) {
    const double v = eval.rate(k);
    if (v > best) {
      best = v;
      best_k = k;
    }
  };

  consider(Matrix::identity(n) * (power / static_cast<double>(n)));

  // Deterministic grid over the eigenvalue/rotation parametrization (n <= 2).
  if (n == 1) {
    for (int i = 0; i <= 64; ++i) {
      Matrix k(1, 1);
      k(0, 0) = power * static_cast<double>(i) / 64.0;
      consider(k);
    }
  } else if (n == 2) {
    const int na = 24, nth = 16, nph = 8;
    for (int ia = 0; ia <= na; ++ia) {
      const double a = power * static_cast<double>(ia) / na;
      for (int ib = 0; a + power * static_cast<double>(ib) / na <= power + 1e-12; ++ib) {
        const double b = power * static_cast<double>(ib) / na;
        for (int it = 0; it < nth; ++it) {
          const double th = 3.141592653589793 * static_cast<double>(it) / nth;
          const double c = std::cos(th), s = std::sin(th);
          for (int ip = 0; ip < nph; ++ip) {
            const double ph = 6.283185307179586 * static_cast<double>(ip) / nph;
            const Complex u = std::polar(1.0, ph);
            Matrix k(2, 2);
            k(0, 0) = a * c * c + b * s * s;
            k(1, 1) = a * s * s + b * c * c;
            k(0, 1) = (a - b) * c * s * std::conj(u);
            k(1, 0) = std::conj(k(0, 1));
            consider(k);
          }
        }
      }
    }
  }

  // Uniform phase: K = c G G* with trace u * P.
  const std::size_t uniform_budget = (budget * 3) / 5;
  for (std::size_t rep = 0; rep < uniform_budget; ++rep) {
    Matrix x(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) x(i, j) = rng.complex_normal();
    Matrix k = x * x.adjoint();
    double tr = k.trace().real();
    const double u = rng.uniform();
    k *= Complex(u * power / std::max(tr, 1e-12), 0.0);
    consider(k);
  }

  // Refinement phase: shrinking random perturbations of the incumbent.
  const std::size_t refine_budget = budget - uniform_budget;
  double sigma = power * 0.5;
  const std::size_t shrink_every = std::max<std::size_t>(refine_budget / 12, 1);
  for (std::size_t rep = 0; rep < refine_budget; ++rep) {
    if (rep > 0 && rep % shrink_every == 0) sigma = std::max(sigma * 0.5, 1e-7 * power);
    Matrix x(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) x(i, j) = rng.complex_normal();
    const Matrix delta = (x + x.adjoint()) * 0.5;
    const HermMatrix cand = project_psd_trace(
        HermMatrix::symmetrized(best_k + delta * sigma), power);
    consider(cand.matrix());
  }

  return std::max(best, 0.0);
}

}  // namespace wiretap
