#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "wiretap/errors.hpp"
#include "wiretap/tolerances.hpp"

namespace wiretap {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Value-semantic; sized for desk-scale
/// problems (dims well below ~64), so every operation simply allocates its
/// result.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  static Matrix from_real(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return e_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  Matrix adjoint() const;
  Matrix transpose() const;
  Matrix conjugate() const;
  Complex trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  Matrix col(std::size_t j) const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(Complex z);
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b, a; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b, a; }
  friend Matrix operator*(Matrix a, Complex z) { return a *= z, a; }
  friend Matrix operator*(Complex z, Matrix a) { return a *= z, a; }
  friend Matrix operator*(Matrix a, double x) { return a *= Complex(x, 0.0), a; }
  friend Matrix operator*(double x, Matrix a) { return a *= Complex(x, 0.0), a; }
  Matrix operator-() const;
  Matrix operator*(const Matrix& o) const;

  static Matrix hcat(const Matrix& a, const Matrix& b);
  static Matrix vcat(const Matrix& a, const Matrix& b);

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> e_;
};

std::string to_pretty_string(const Matrix& m);

/// Square complex matrix carrying the Hermitian-symmetry invariant. Entries
/// are stored exactly symmetrized, (M + M*)/2, so diagonals are exactly real.
class HermMatrix {
 public:
  HermMatrix() = default;

  /// Rejects deviations beyond tol::symmetry (relative), then symmetrizes.
  static HermMatrix from(const Matrix& m);
  /// Averages (M + M*)/2 without the deviation check; for products that are
  /// Hermitian by construction up to rounding.
  static HermMatrix symmetrized(const Matrix& m);
  static HermMatrix zero(std::size_t n);
  static HermMatrix identity(std::size_t n);
  static HermMatrix diag(const std::vector<double>& d);

  std::size_t dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  double trace_real() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }
  bool operator==(const HermMatrix& o) const { return m_ == o.m_; }

 private:
  Matrix m_;
};

HermMatrix herm_add(const HermMatrix& a, const HermMatrix& b);
HermMatrix herm_sub(const HermMatrix& a, const HermMatrix& b);
HermMatrix herm_scale(const HermMatrix& a, double s);

/// Hermitian eigendecomposition, values ascending, vectors unitary.
struct EigenH {
  std::vector<double> values;
  Matrix vectors;
};

/// General (possibly non-normal) eigenpairs; unit right eigenvectors.
struct GeneralEigen {
  std::vector<Complex> values;
  Matrix vectors;
};

enum class LoewnerClass { PD, PSD, ND, NSD, INDEFINITE, ZERO };

const char* to_string(LoewnerClass c);

// --- eigensolvers -----------------------------------------------------------

/// Cyclic Jacobi on the complex Hermitian matrix.
EigenH eig_herm(const HermMatrix& m);

/// Householder Hessenberg reduction + implicitly shifted QR; eigenvectors by
/// inverse iteration on the original matrix.
GeneralEigen eig_general(const Matrix& m);

// --- PD kit -----------------------------------------------------------------

double pd_threshold(const HermMatrix& m);  // tol::pd * ||m||_F
double min_eig_herm(const HermMatrix& m);
bool is_pd(const HermMatrix& m);

double logdet_pd(const HermMatrix& m);  // nats
HermMatrix inv_pd(const HermMatrix& m);
HermMatrix sqrt_psd(const HermMatrix& m);

// --- order / spectra --------------------------------------------------------

LoewnerClass loewner_compare(const HermMatrix& a, const HermMatrix& b);

/// Eigenvalues of A*B for PD A, B via the Hermitian congruence
/// A^{1/2} B A^{1/2}; ascending, strictly positive.
std::vector<double> spd_product_eigs(const HermMatrix& a, const HermMatrix& b);

/// Frobenius-nearest K with K PSD and Tr(K) <= power.
HermMatrix project_psd_trace(const HermMatrix& m, double power);

/// Inverse of [[T11, T12], [T21, T22]] assembled through the LDU
/// factorization with the Schur complement of T11.
Matrix block2x2_inv(const Matrix& t11, const Matrix& t12,
                    const Matrix& t21, const Matrix& t22);

// --- general solves ---------------------------------------------------------

Matrix solve_lu(const Matrix& a, const Matrix& rhs);  // throws SingularMatrix
Matrix inverse_lu(const Matrix& a);

std::vector<double> singular_values(const Matrix& a);  // ascending
double cond2(const Matrix& a);
double sigma_min(const Matrix& a);

/// Orthonormal basis of the numerical kernel {x : sigma <= sigma_tol}.
Matrix kernel_basis(const Matrix& a, double sigma_tol);

/// (A*A)^{-1} A* for full column rank A.
Matrix pinv_tall(const Matrix& a);

}  // namespace wiretap
