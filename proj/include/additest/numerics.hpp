#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "additest/common.hpp"

namespace additest {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small and unapologetically simple: every matrix
/// in this project is at most a few hundred rows, so we favor clarity over
/// blocked kernels.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, Vector entries);

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  Vector row(std::size_t i) const;
  Vector col(std::size_t j) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Matrix transpose(const Matrix& a);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double max_abs(const Vector& a);
double max_abs(const Matrix& a);

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
/// Pivots below rel_tol * max(diag(A)) abort with SingularMatrixError; the
/// smallest accepted pivot is kept as a conditioning diagnostic.
class CholeskyFactor {
 public:
  static CholeskyFactor compute(const Matrix& a, double rel_tol = 1e-12);

  Vector solve(const Vector& b) const;
  double smallest_pivot() const { return smallest_pivot_; }
  std::size_t dim() const { return l_.rows(); }

 private:
  CholeskyFactor() = default;
  Matrix l_;
  double smallest_pivot_ = 0.0;
};

/// Solves a x = b for symmetric positive definite a.
Vector solve_spd(const Matrix& a, const Vector& b);

/// Rank-revealing pivoted Cholesky of a symmetric positive semidefinite
/// matrix: A ~= B B^T with B having `rank` columns. Pivots are accepted
/// while they exceed rel_tol * max(diag(A)).
struct PivotedCholesky {
  Matrix b;
  std::size_t rank = 0;
};
PivotedCholesky pivoted_cholesky(const Matrix& a, double rel_tol = 1e-10);

/// Moore-Penrose pseudo-inverse of a symmetric positive semidefinite matrix
/// via the rank-truncated factorization above.
Matrix pseudo_inverse_spsd(const Matrix& a, double rel_tol = 1e-10);

/// Orthonormalizes the columns of g (rows >= cols) with modified Gram-Schmidt
/// plus one re-orthogonalization pass. The first nonzero entry of each output
/// column is made positive so results are reproducible. Throws RankError when
/// a column collapses below tolerance after projection.
Matrix gram_schmidt_columns(const Matrix& g);

/// Numerical rank of a matrix: number of rows surviving pivoted
/// Gram-Schmidt elimination at the given relative tolerance.
std::size_t matrix_rank(const Matrix& a, double rel_tol = 1e-8);

// --- Distribution functions -------------------------------------------------

/// P[chi^2_df <= x].
double chi_sq_cdf(double x, unsigned df);

/// Inverse of chi_sq_cdf in x: chi_sq_cdf(chi_sq_quantile(p, df), df) == p
/// to ~1e-12.
double chi_sq_quantile(double p, unsigned df);

double normal_cdf(double x);
double normal_quantile(double p);

/// p-quantile of the mean of m independent uniform(0,1) variables.
/// Exact Irwin-Hall inversion for m <= 12; the convolution alternates signs
/// and loses all precision for large m, so beyond that the N(1/2, 1/(12m))
/// approximation is used. Result clamped to [0,1].
double bates_quantile(double p, unsigned m);

// --- Random streams ----------------------------------------------------------

/// Counter-keyed deterministic random stream. The (seed, stream) pair fully
/// determines the sequence; the engine and all transforms avoid
/// implementation-defined std distributions so replays match across
/// platforms and thread counts.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// Uniform integer on [0, bound), bound >= 1, rejection-sampled (unbiased).
  std::uint64_t uniform_int(std::uint64_t bound);

  /// Child stream keyed by (a, b); independent of the parent's position.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0) const;

 private:
  std::uint64_t next_raw();
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Vector sample_std_normal(RngStream& rng, std::size_t n);

/// `count` distinct indices from {0, ..., population-1}, order as drawn.
std::vector<std::size_t> sample_without_replacement(RngStream& rng,
                                                    std::size_t population,
                                                    std::size_t count);

}  // namespace additest
