#include "wiretap/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace wiretap {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr ? rows.begin()->size() : 0;
  Matrix m(nr, nc);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == nc, "ragged initializer");
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::from_real(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr ? rows.begin()->size() : 0;
  Matrix m(nr, nc);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == nc, "ragged initializer");
    std::size_t j = 0;
    for (const auto& v : row) m(i, j++) = Complex(v, 0.0);
    ++i;
  }
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

Matrix Matrix::conjugate() const {
  Matrix r(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(i, j) = std::conj((*this)(i, j));
  return r;
}

Complex Matrix::trace() const {
  require(is_square(), "trace of non-square matrix");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& z : e_) s += std::norm(z);
  return std::sqrt(s);
}

bool Matrix::all_finite() const {
  for (const Complex& z : e_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  require(r0 + nr <= rows_ && c0 + nc <= cols_, "block out of range");
  Matrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  require(r0 + b.rows() <= rows_ && c0 + b.cols() <= cols_, "block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Matrix Matrix::col(std::size_t j) const { return block(0, j, rows_, 1); }

Matrix& Matrix::operator+=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "add: shape mismatch");
  for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "sub: shape mismatch");
  for (std::size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
  return *this;
}

Matrix& Matrix::operator*=(Complex z) {
  for (Complex& v : e_) v *= z;
  return *this;
}

Matrix Matrix::operator-() const {
  Matrix r = *this;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(i, j) = -r(i, j);
  return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
  require(cols_ == o.rows_, "mul: inner dimension mismatch");
  Matrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Complex a = (*this)(i, k);
      if (a == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  }
  return r;
}

Matrix Matrix::hcat(const Matrix& a, const Matrix& b) {
  if (a.empty() && a.rows() == 0) return b;
  if (b.empty() && b.rows() == 0) return a;
  require(a.rows() == b.rows(), "hcat: row mismatch");
  Matrix r(a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

Matrix Matrix::vcat(const Matrix& a, const Matrix& b) {
  if (a.empty() && a.cols() == 0) return b;
  if (b.empty() && b.cols() == 0) return a;
  require(a.cols() == b.cols(), "vcat: column mismatch");
  Matrix r(a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

std::string to_pretty_string(const Matrix& m) {
  std::string out;
  char buf[80];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += i == 0 ? "[" : " ";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%+.6g%+.6gi", m(i, j).real(), m(i, j).imag());
      out += buf;
      if (j + 1 < m.cols()) out += "  ";
    }
    out += i + 1 == m.rows() ? "]" : "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// HermMatrix
// ---------------------------------------------------------------------------

HermMatrix HermMatrix::symmetrized(const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("HermMatrix: non-square");
  if (!m.all_finite()) throw InvalidMatrix("HermMatrix: non-finite entries");
  HermMatrix h;
  h.m_ = Matrix(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    h.m_(i, i) = Complex(m(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h.m_(i, j) = v;
      h.m_(j, i) = std::conj(v);
    }
  }
  return h;
}

HermMatrix HermMatrix::from(const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("HermMatrix: non-square");
  if (!m.all_finite()) throw InvalidMatrix("HermMatrix: non-finite entries");
  double dev = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
  const double scale = std::max(1.0, m.frobenius_norm());
  if (dev > tol::symmetry * scale)
    throw InvalidMatrix("HermMatrix: symmetry deviation " + std::to_string(dev));
  return symmetrized(m);
}

HermMatrix HermMatrix::zero(std::size_t n) { return symmetrized(Matrix(n, n)); }

HermMatrix HermMatrix::identity(std::size_t n) { return symmetrized(Matrix::identity(n)); }

HermMatrix HermMatrix::diag(const std::vector<double>& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return symmetrized(m);
}

HermMatrix herm_add(const HermMatrix& a, const HermMatrix& b) {
  return HermMatrix::symmetrized(a.matrix() + b.matrix());
}

HermMatrix herm_sub(const HermMatrix& a, const HermMatrix& b) {
  return HermMatrix::symmetrized(a.matrix() - b.matrix());
}

HermMatrix herm_scale(const HermMatrix& a, double s) {
  return HermMatrix::symmetrized(a.matrix() * s);
}

const char* to_string(LoewnerClass c) {
  switch (c) {
    case LoewnerClass::PD: return "PD";
    case LoewnerClass::PSD: return "PSD";
    case LoewnerClass::ND: return "ND";
    case LoewnerClass::NSD: return "NSD";
    case LoewnerClass::INDEFINITE: return "INDEFINITE";
    case LoewnerClass::ZERO: return "ZERO";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver: cyclic Jacobi with complex rotations
// ---------------------------------------------------------------------------

namespace {

double offdiag_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t p = 0; p + 1 < a.rows(); ++p)
    for (std::size_t q = p + 1; q < a.cols(); ++q) s += std::norm(a(p, q));
  return std::sqrt(2.0 * s);
}

}  // namespace

EigenH eig_herm(const HermMatrix& hm) {
  const std::size_t n = hm.dim();
  Matrix a = hm.matrix();
  Matrix v = Matrix::identity(n);
  if (n > 1) {
    const double scale = std::max(a.frobenius_norm(), 1e-300);
    const double stop = 1e-14 * scale;
    for (int sweep = 0; sweep < 60; ++sweep) {
      if (offdiag_norm(a) <= stop) break;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const double apq = std::abs(a(p, q));
          if (apq <= 1e-300) continue;
          const Complex phase = a(p, q) / apq;
          const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * apq);
          const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const Complex sp = (t * c) * phase;
          // A <- J* A J with J = [[c, sp], [-conj(sp), c]] on the (p,q) plane.
          for (std::size_t k = 0; k < n; ++k) {
            const Complex xp = a(k, p), xq = a(k, q);
            a(k, p) = c * xp - std::conj(sp) * xq;
            a(k, q) = sp * xp + c * xq;
          }
          for (std::size_t k = 0; k < n; ++k) {
            const Complex xp = a(p, k), xq = a(q, k);
            a(p, k) = c * xp - sp * xq;
            a(q, k) = std::conj(sp) * xp + c * xq;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (std::size_t k = 0; k < n; ++k) {
            const Complex xp = v(k, p), xq = v(k, q);
            v(k, p) = c * xp - std::conj(sp) * xq;
            v(k, q) = sp * xp + c * xq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenH out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

double pd_threshold(const HermMatrix& m) { return tol::pd * m.frobenius_norm(); }

double min_eig_herm(const HermMatrix& m) {
  if (m.dim() == 0) return 0.0;
  return eig_herm(m).values.front();
}

bool is_pd(const HermMatrix& m) { return min_eig_herm(m) > pd_threshold(m); }

double logdet_pd(const HermMatrix& m) {
  const EigenH e = eig_herm(m);
  const double thr = pd_threshold(m);
  double s = 0.0;
  for (double lam : e.values) {
    if (lam <= thr) throw NotPositiveDefinite("logdet_pd: min eigenvalue " + std::to_string(lam));
    s += std::log(lam);
  }
  return s;
}

HermMatrix inv_pd(const HermMatrix& m) {
  const EigenH e = eig_herm(m);
  const double thr = pd_threshold(m);
  const std::size_t n = m.dim();
  for (double lam : e.values)
    if (lam <= thr) throw NotPositiveDefinite("inv_pd: min eigenvalue " + std::to_string(lam));
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += e.vectors(i, k) * std::conj(e.vectors(j, k)) / e.values[k];
      r(i, j) = s;
    }
  return HermMatrix::symmetrized(r);
}

HermMatrix sqrt_psd(const HermMatrix& m) {
  const EigenH e = eig_herm(m);
  const std::size_t n = m.dim();
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double lam = std::max(e.values[k], 0.0);
        s += e.vectors(i, k) * std::conj(e.vectors(j, k)) * std::sqrt(lam);
      }
      r(i, j) = s;
    }
  return HermMatrix::symmetrized(r);
}

LoewnerClass loewner_compare(const HermMatrix& a, const HermMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("loewner_compare: dim mismatch");
  const HermMatrix d = herm_sub(a, b);
  const double dn = d.frobenius_norm();
  if (dn <= tol::zero * std::max({a.frobenius_norm(), b.frobenius_norm(), 1.0}))
    return LoewnerClass::ZERO;
  const EigenH e = eig_herm(d);
  const double dead = tol::rank * dn;
  std::size_t pos = 0, neg = 0, nil = 0;
  for (double lam : e.values) {
    if (lam > dead)
      ++pos;
    else if (lam < -dead)
      ++neg;
    else
      ++nil;
  }
  if (pos && neg) return LoewnerClass::INDEFINITE;
  if (pos) return nil ? LoewnerClass::PSD : LoewnerClass::PD;
  if (neg) return nil ? LoewnerClass::NSD : LoewnerClass::ND;
  return LoewnerClass::ZERO;
}

std::vector<double> spd_product_eigs(const HermMatrix& a, const HermMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("spd_product_eigs: dim mismatch");
  if (!is_pd(a)) throw NotPositiveDefinite("spd_product_eigs: A not PD");
  if (!is_pd(b)) throw NotPositiveDefinite("spd_product_eigs: B not PD");
  const HermMatrix ah = sqrt_psd(a);
  const HermMatrix c = HermMatrix::symmetrized(ah.matrix() * b.matrix() * ah.matrix());
  return eig_herm(c).values;
}

HermMatrix project_psd_trace(const HermMatrix& m, double power) {
  if (!(power > 0.0)) throw InvalidMatrix("project_psd_trace: power must be > 0");
  const EigenH e = eig_herm(m);
  const std::size_t n = m.dim();
  std::vector<double> x(n);
  double clipped_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::max(e.values[i], 0.0);
    clipped_sum += x[i];
  }
  if (clipped_sum > power) {
    // Euclidean projection of the eigenvalue vector onto {x >= 0, sum = power}.
    std::vector<double> u(e.values);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cum += u[i];
      const double cand = (cum - power) / static_cast<double>(i + 1);
      if (u[i] - cand > 0.0) {
        k = i + 1;
        theta = cand;
      }
    }
    (void)k;
    for (std::size_t i = 0; i < n; ++i) x[i] = std::max(e.values[i] - theta, 0.0);
  }
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k2 = 0; k2 < n; ++k2)
        s += e.vectors(i, k2) * std::conj(e.vectors(j, k2)) * x[k2];
      r(i, j) = s;
    }
  return HermMatrix::symmetrized(r);
}

// ---------------------------------------------------------------------------
// LU with partial pivoting (complex, general square)
// ---------------------------------------------------------------------------

namespace {

struct Lu {
  Matrix lu;
  std::vector<std::size_t> perm;
  bool singular = false;
};

Lu lu_factor(const Matrix& a, bool tolerate_singular = false) {
  require(a.is_square(), "lu_factor: non-square");
  const std::size_t n = a.rows();
  Lu f;
  f.lu = a;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = std::abs(f.lu(i, k));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best <= kEps * scale) {
      f.singular = true;
      if (!tolerate_singular) return f;
      // Inverse iteration wants a solvable system near singularity; nudge the
      // pivot instead of aborting.
      f.lu(piv, k) += Complex(kEps * scale * 16.0, 0.0);
    }
    if (piv != k) {
      std::swap(f.perm[piv], f.perm[k]);
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(piv, j), f.lu(k, j));
    }
    const Complex d = f.lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex l = f.lu(i, k) / d;
      f.lu(i, k) = l;
      if (l == Complex(0.0, 0.0)) continue;
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
    }
  }
  return f;
}

Matrix lu_solve(const Lu& f, const Matrix& rhs) {
  const std::size_t n = f.lu.rows();
  require(rhs.rows() == n, "lu_solve: rhs rows mismatch");
  Matrix x(n, rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    std::vector<Complex> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = rhs(f.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      Complex s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * x(j, c);
      x(ii, c) = s / f.lu(ii, ii);
    }
  }
  return x;
}

}  // namespace

Matrix solve_lu(const Matrix& a, const Matrix& rhs) {
  Lu f = lu_factor(a);
  if (f.singular) throw SingularMatrix("solve_lu: singular matrix");
  return lu_solve(f, rhs);
}

Matrix inverse_lu(const Matrix& a) { return solve_lu(a, Matrix::identity(a.rows())); }

namespace {

// One-sided Jacobi SVD: rotates columns of A directly, so tiny singular
// values are resolved to machine precision instead of drowning in the
// rounding noise of A*A.
struct SvdRight {
  std::vector<double> sigma;  // ascending
  Matrix v;                   // right singular vectors, columns match sigma
};

SvdRight one_sided_jacobi(const Matrix& input) {
  Matrix a = input;
  const std::size_t n = a.cols();
  const std::size_t rows = a.rows();
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 60 && n > 1; ++sweep) {
    bool converged = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double gii = 0.0, gjj = 0.0;
        Complex gij = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          gii += std::norm(a(r, i));
          gjj += std::norm(a(r, j));
          gij += std::conj(a(r, i)) * a(r, j);
        }
        const double apq = std::abs(gij);
        if (apq <= 1e-30 || apq <= 1e-16 * std::sqrt(gii * gjj)) continue;
        converged = false;
        const Complex phase = gij / apq;
        const double tau = (gjj - gii) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const Complex sp = (t * c) * phase;
        for (std::size_t r = 0; r < rows; ++r) {
          const Complex xi = a(r, i), xj = a(r, j);
          a(r, i) = c * xi - std::conj(sp) * xj;
          a(r, j) = sp * xi + c * xj;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const Complex xi = v(r, i), xj = v(r, j);
          v(r, i) = c * xi - std::conj(sp) * xj;
          v(r, j) = sp * xi + c * xj;
        }
      }
    }
    if (converged) break;
  }
  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += std::norm(a(r, j));
    sig[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return sig[x] < sig[y]; });
  SvdRight out;
  out.sigma.resize(n);
  out.v = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.sigma[j] = sig[order[j]];
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, order[j]);
  }
  return out;
}

}  // namespace

std::vector<double> singular_values(const Matrix& a) { return one_sided_jacobi(a).sigma; }

double cond2(const Matrix& a) {
  const std::vector<double> s = singular_values(a);
  if (s.empty()) return 1.0;
  if (s.front() <= 0.0) return std::numeric_limits<double>::infinity();
  return s.back() / s.front();
}

double sigma_min(const Matrix& a) {
  const std::vector<double> s = singular_values(a);
  return s.empty() ? 0.0 : s.front();
}

Matrix kernel_basis(const Matrix& a, double sigma_tol) {
  const SvdRight svd = one_sided_jacobi(a);
  const std::size_t n = a.cols();
  std::size_t k = 0;
  while (k < n && svd.sigma[k] <= sigma_tol) ++k;
  return svd.v.block(0, 0, n, k);
}

Matrix pinv_tall(const Matrix& a) {
  const HermMatrix ata = HermMatrix::symmetrized(a.adjoint() * a);
  return inv_pd(ata).matrix() * a.adjoint();
}

// ---------------------------------------------------------------------------
// General eigensolver: Hessenberg + implicitly shifted QR, inverse iteration
// ---------------------------------------------------------------------------

namespace {

void hessenberg_reduce(Matrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - 1 - k;  // length of the column below the diagonal
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(h(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm <= 1e-300) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex(1.0, 0.0);
    const Complex alpha = -phase * xnorm;
    std::vector<Complex> vvec(m);
    for (std::size_t i = 0; i < m; ++i) vvec[i] = h(k + 1 + i, k);
    vvec[0] -= alpha;
    double beta = 0.0;
    for (const Complex& z : vvec) beta += std::norm(z);
    if (beta <= 1e-300) continue;
    const double tau = 2.0 / beta;
    // Rows k+1..n-1: H <- (I - tau v v*) H
    for (std::size_t j = 0; j < n; ++j) {
      Complex dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += std::conj(vvec[i]) * h(k + 1 + i, j);
      dot *= tau;
      for (std::size_t i = 0; i < m; ++i) h(k + 1 + i, j) -= dot * vvec[i];
    }
    // Columns k+1..n-1: H <- H (I - tau v v*)
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) dot += h(i, k + 1 + j) * vvec[j];
      dot *= tau;
      for (std::size_t j = 0; j < m; ++j) h(i, k + 1 + j) -= dot * std::conj(vvec[j]);
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

struct Givens {
  Complex c, s;  // G = [[c, s], [-conj(s), conj(c)]], G [a; b] = [r; 0]
};

Givens make_givens(Complex a, Complex b) {
  const double rho = std::sqrt(std::norm(a) + std::norm(b));
  if (rho <= 1e-300 || std::abs(b) == 0.0) return {Complex(1.0, 0.0), Complex(0.0, 0.0)};
  return {std::conj(a) / rho, std::conj(b) / rho};
}

Complex wilkinson_shift(const Matrix& h, std::size_t hi) {
  const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi);
  const Complex c = h(hi, hi - 1), d = h(hi, hi);
  const Complex delta = 0.5 * (a - d);
  const Complex root = std::sqrt(delta * delta + b * c);
  const Complex denom1 = delta + root, denom2 = delta - root;
  const Complex denom = std::abs(denom1) >= std::abs(denom2) ? denom1 : denom2;
  if (std::abs(denom) <= 1e-300) return d;
  return d - b * c / denom;
}

std::vector<Complex> qr_eigenvalues(Matrix h) {
  const std::size_t n = h.rows();
  std::vector<Complex> values(n);
  if (n == 0) return values;
  if (n == 1) {
    values[0] = h(0, 0);
    return values;
  }
  hessenberg_reduce(h);
  const double hnorm = std::max(h.frobenius_norm(), 1e-300);

  std::size_t hi = n - 1;
  int since_deflate = 0;
  long total = 0;
  const long limit = 200 * static_cast<long>(n) + 200;
  while (true) {
    // Deflate trailing 1x1 blocks.
    while (hi > 0) {
      const double sub = std::abs(h(hi, hi - 1));
      const double ref = std::abs(h(hi - 1, hi - 1)) + std::abs(h(hi, hi));
      if (sub <= kEps * (ref > 0.0 ? ref : hnorm)) {
        h(hi, hi - 1) = 0.0;
        values[hi] = h(hi, hi);
        --hi;
        since_deflate = 0;
      } else {
        break;
      }
    }
    if (hi == 0) {
      values[0] = h(0, 0);
      break;
    }
    // Active window [lo, hi].
    std::size_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double ref = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (sub <= kEps * (ref > 0.0 ? ref : hnorm)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (++total > limit) throw NumericalFailure("eig_general: QR iteration stalled");
    Complex mu;
    if (++since_deflate % 13 == 0) {
      mu = h(hi, hi) + Complex(0.75, 0.05) * std::abs(h(hi, hi - 1));
    } else {
      mu = wilkinson_shift(h, hi);
    }
    // Explicit shifted QR step on the window.
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    std::vector<Givens> rots;
    rots.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens g = make_givens(h(k, k), h(k + 1, k));
      rots.push_back(g);
      for (std::size_t j = k; j <= hi; ++j) {
        const Complex x = h(k, j), y = h(k + 1, j);
        h(k, j) = g.c * x + g.s * y;
        h(k + 1, j) = -std::conj(g.s) * x + std::conj(g.c) * y;
      }
      h(k + 1, k) = 0.0;
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens& g = rots[k - lo];
      const std::size_t top = lo;
      const std::size_t bot = std::min(k + 1, hi);
      for (std::size_t i = top; i <= bot; ++i) {
        const Complex x = h(i, k), y = h(i, k + 1);
        h(i, k) = x * std::conj(g.c) + y * std::conj(g.s);
        h(i, k + 1) = -x * g.s + y * g.c;
      }
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  return values;
}

Matrix unit_column(const std::vector<Complex>& v) {
  Matrix c(v.size(), 1);
  double nrm = 0.0;
  for (const Complex& z : v) nrm += std::norm(z);
  nrm = std::sqrt(nrm);
  for (std::size_t i = 0; i < v.size(); ++i) c(i, 0) = v[i] / nrm;
  return c;
}

}  // namespace

GeneralEigen eig_general(const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("eig_general: non-square");
  if (!m.all_finite()) throw InvalidMatrix("eig_general: non-finite entries");
  const std::size_t n = m.rows();
  GeneralEigen out;
  out.values = qr_eigenvalues(m);
  out.vectors = Matrix(n, n);
  const double scale = std::max(m.frobenius_norm(), 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    // Inverse iteration with a slightly perturbed shift; the perturbation
    // keeps the factorization solvable when lambda is (numerically) exact.
    const Complex shift = out.values[j] + Complex(1e-13, 3e-14) * scale;
    Matrix a = m;
    for (std::size_t i = 0; i < n; ++i) a(i, i) -= shift;
    const Lu f = lu_factor(a, /*tolerate_singular=*/true);
    std::vector<Complex> v(n);
    // Deterministic pseudo-random start, fixed across platforms.
    for (std::size_t i = 0; i < n; ++i)
      v[i] = Complex(0.5 + 0.1 * static_cast<double>((7 * i + 3 * j) % 11),
                     0.3 + 0.1 * static_cast<double>((5 * i + j) % 7));
    Matrix best = unit_column(v);
    double best_res = std::numeric_limits<double>::infinity();
    Matrix x = best;
    for (int it = 0; it < 5; ++it) {
      x = lu_solve(f, x);
      double nrm = x.frobenius_norm();
      if (!(nrm > 0.0) || !x.all_finite()) break;
      x *= Complex(1.0 / nrm, 0.0);
      const Matrix r = m * x - x * out.values[j];
      const double res = r.frobenius_norm();
      if (res < best_res) {
        best_res = res;
        best = x;
      }
      if (res <= 1e-14 * scale) break;
    }
    out.vectors.set_block(0, j, best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block 2x2 inverse via the LDU factorization with the Schur complement
// ---------------------------------------------------------------------------

Matrix block2x2_inv(const Matrix& t11, const Matrix& t12,
                    const Matrix& t21, const Matrix& t22) {
  require(t11.is_square() && t22.is_square(), "block2x2_inv: diagonal blocks must be square");
  const std::size_t p = t11.rows(), q = t22.rows();
  require(t12.rows() == p && t12.cols() == q && t21.rows() == q && t21.cols() == p,
          "block2x2_inv: off-diagonal block shape mismatch");
  Matrix t11_inv, s_inv;
  try {
    t11_inv = inverse_lu(t11);
  } catch (const SingularMatrix&) {
    throw SingularBlock("block2x2_inv: T11 singular");
  }
  const Matrix schur = t22 - t21 * t11_inv * t12;
  try {
    s_inv = inverse_lu(schur);
  } catch (const SingularMatrix&) {
    throw SingularBlock("block2x2_inv: Schur complement singular");
  }
  const Matrix b12 = t11_inv * t12;
  const Matrix b21 = t21 * t11_inv;
  Matrix out(p + q, p + q);
  out.set_block(0, 0, t11_inv + b12 * s_inv * b21);
  out.set_block(0, p, -(b12 * s_inv));
  out.set_block(p, 0, -(s_inv * b21));
  out.set_block(p, p, s_inv);
  return out;
}

}  // namespace wiretap
