#include "additest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

namespace additest {

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("Matrix: entry count does not match shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::row(std::size_t i) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vector Matrix::col(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions do not match");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    throw std::invalid_argument("matvec: dimensions do not match");
  }
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix +: shapes differ");
  }
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix -: shapes differ");
  }
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data()) v *= s;
  return c;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs(const Matrix& a) { return max_abs(a.data()); }

// --- Cholesky ----------------------------------------------------------------

CholeskyFactor CholeskyFactor::compute(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("cholesky: matrix not square");
  }
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double tol = rel_tol * std::max(max_diag, 0.0);

  CholeskyFactor f;
  f.l_ = Matrix(n, n);
  Matrix& l = f.l_;
  f.smallest_pivot_ = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol)) {
      throw SingularMatrixError(
          "cholesky: pivot " + std::to_string(j) + " is " + std::to_string(d) +
              ", below tolerance " + std::to_string(tol),
          j, d);
    }
    f.smallest_pivot_ = std::min(f.smallest_pivot_, d);
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return f;
}

Vector CholeskyFactor::solve(const Vector& b) const {
  const std::size_t n = l_.rows();
  if (b.size() != n) {
    throw std::invalid_argument("cholesky solve: dimension mismatch");
  }
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * y[k];
    y[i] = s / l_(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  return CholeskyFactor::compute(a).solve(b);
}

PivotedCholesky pivoted_cholesky(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("pivoted cholesky: matrix not square");
  }
  const std::size_t n = a.rows();
  Vector diag(n);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = a(i, i);
    max_diag = std::max(max_diag, diag[i]);
  }
  const double tol = rel_tol * std::max(max_diag, 0.0);

  Matrix b(n, n);  // trimmed to `rank` columns below
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::size_t rank = 0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = step;
    for (std::size_t i = step + 1; i < n; ++i) {
      if (diag[order[i]] > diag[order[best]]) best = i;
    }
    std::swap(order[step], order[best]);
    const std::size_t p = order[step];
    if (!(diag[p] > tol)) break;

    const double piv = std::sqrt(diag[p]);
    b(p, step) = piv;
    for (std::size_t ii = step + 1; ii < n; ++ii) {
      const std::size_t i = order[ii];
      double s = a(i, p);
      for (std::size_t k = 0; k < step; ++k) s -= b(i, k) * b(p, k);
      b(i, step) = s / piv;
      diag[i] -= b(i, step) * b(i, step);
    }
    ++rank;
  }

  PivotedCholesky out;
  out.rank = rank;
  out.b = Matrix(n, rank);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rank; ++k) out.b(i, k) = b(i, k);
  }
  return out;
}

Matrix pseudo_inverse_spsd(const Matrix& a, double rel_tol) {
  PivotedCholesky pc = pivoted_cholesky(a, rel_tol);
  const std::size_t n = a.rows();
  if (pc.rank == 0) return Matrix(n, n);
  // A = B B^T with B full column rank, so A+ = B (B^T B)^-2 B^T.
  const Matrix bt = transpose(pc.b);
  const Matrix g = matmul(bt, pc.b);
  CholeskyFactor gf = CholeskyFactor::compute(g, 1e-14);
  Matrix m(pc.rank, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector col = gf.solve(gf.solve(bt.col(j)));
    for (std::size_t i = 0; i < pc.rank; ++i) m(i, j) = col[i];
  }
  return matmul(pc.b, m);
}

// --- Orthonormalization ------------------------------------------------------

namespace {

void fix_column_sign(Matrix& q, std::size_t j, double tol) {
  for (std::size_t i = 0; i < q.rows(); ++i) {
    if (std::fabs(q(i, j)) > tol) {
      if (q(i, j) < 0.0) {
        for (std::size_t r = 0; r < q.rows(); ++r) q(r, j) = -q(r, j);
      }
      return;
    }
  }
}

}  // namespace

Matrix gram_schmidt_columns(const Matrix& g) {
  if (g.rows() < g.cols()) {
    throw std::invalid_argument("gram_schmidt_columns: more columns than rows");
  }
  const std::size_t n = g.rows();
  const std::size_t r = g.cols();
  Matrix q = g;
  for (std::size_t j = 0; j < r; ++j) {
    // Two passes of modified Gram-Schmidt; the second recovers the
    // orthogonality lost to cancellation when columns are nearly dependent.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += q(i, k) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= c * q(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) {
      throw RankError("gram_schmidt_columns: column " + std::to_string(j) +
                      " dependent on earlier columns");
    }
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
    fix_column_sign(q, j, 1e-12);
  }
  return q;
}

std::size_t matrix_rank(const Matrix& a, double rel_tol) {
  const std::size_t m = a.rows();
  std::vector<Vector> rows(m);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    rows[i] = a.row(i);
    max_norm = std::max(max_norm, norm2(rows[i]));
  }
  const double tol = rel_tol * max_norm;
  std::size_t rank = 0;
  std::vector<bool> used(m, false);
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t best = m;
    double best_norm = tol;
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      const double nn = norm2(rows[i]);
      if (nn > best_norm) {
        best_norm = nn;
        best = i;
      }
    }
    if (best == m) break;
    used[best] = true;
    ++rank;
    Vector q = rows[best];
    for (double& v : q) v /= best_norm;
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      const double c = dot(q, rows[i]);
      for (std::size_t jj = 0; jj < q.size(); ++jj) rows[i][jj] -= c * q[jj];
    }
  }
  return rank;
}

// --- Gamma / chi-square ------------------------------------------------------

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 1000;

// Regularized lower incomplete gamma P(a, x) by its power series; converges
// quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("gamma series failed to converge");
}

// Regularized upper incomplete gamma Q(a, x) by the Lentz continued
// fraction; the complement of the series region.
double gamma_q_cf(double a, double x) {
  const double fpmin = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("gamma continued fraction failed to converge");
}

double chi_sq_log_pdf(double x, unsigned df) {
  const double a = 0.5 * df;
  return (a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) -
         std::lgamma(a);
}

}  // namespace

double chi_sq_cdf(double x, unsigned df) {
  if (df == 0) throw std::invalid_argument("chi_sq_cdf: df must be positive");
  if (x < 0.0) throw std::invalid_argument("chi_sq_cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double a = 0.5 * df;
  const double t = 0.5 * x;
  const double p =
      (x < df + 1.0) ? gamma_p_series(a, t) : 1.0 - gamma_q_cf(a, t);
  return std::clamp(p, 0.0, 1.0);
}

double chi_sq_quantile(double p, unsigned df) {
  if (df == 0) {
    throw std::invalid_argument("chi_sq_quantile: df must be positive");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("chi_sq_quantile: p must lie in (0,1)");
  }
  double lo = 0.0;
  double hi = df + 10.0 * std::sqrt(2.0 * df) + 20.0;
  while (chi_sq_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-14 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi_sq_cdf(mid, df) < p ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  // Newton polish; bisection already has ~full precision but this drives the
  // CDF residual to roundoff even when the density is tiny.
  for (int i = 0; i < 4; ++i) {
    const double f = chi_sq_cdf(x, df) - p;
    const double dpdf = std::exp(chi_sq_log_pdf(x, df));
    if (dpdf <= 0.0) break;
    const double step = f / dpdf;
    const double next = x - step;
    if (!(next > 0.0)) break;
    x = next;
  }
  return x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
  }
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::fabs(hi));
       ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// CDF of the sum of m independent uniform(0,1) variables at t in [0, m].
// Alternating signs limit this to small m; fine through m = 12.
double irwin_hall_cdf(double t, unsigned m) {
  if (t <= 0.0) return 0.0;
  if (t >= m) return 1.0;
  double fact = 1.0;
  for (unsigned i = 2; i <= m; ++i) fact *= i;
  double sum = 0.0;
  double binom = 1.0;  // C(m, j)
  const auto jmax = static_cast<unsigned>(std::floor(t));
  for (unsigned j = 0; j <= jmax; ++j) {
    const double term = binom * std::pow(t - j, static_cast<double>(m));
    sum += (j % 2 == 0) ? term : -term;
    binom = binom * (m - j) / (j + 1.0);
  }
  return std::clamp(sum / fact, 0.0, 1.0);
}

}  // namespace

double bates_quantile(double p, unsigned m) {
  if (m == 0) throw std::invalid_argument("bates_quantile: m must be >= 1");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("bates_quantile: p must lie in (0,1)");
  }
  if (m == 1) return p;
  if (m > 12) {
    const double q =
        0.5 + normal_quantile(p) * std::sqrt(1.0 / (12.0 * static_cast<double>(m)));
    return std::clamp(q, 0.0, 1.0);
  }
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (irwin_hall_cdf(mid * m, m) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// --- RngStream ----------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0xda942042e4dd58b5ULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_key(seed, stream)) {}

std::uint64_t RngStream::next_raw() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t RngStream::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_int: bound must be >= 1");
  const std::uint64_t limit = bound * (~0ULL / bound);
  std::uint64_t x;
  do {
    x = next_raw();
  } while (x >= limit);
  return x % bound;
}

RngStream RngStream::substream(std::uint64_t a, std::uint64_t b) const {
  std::uint64_t s = stream_ ^ (a * 0xd1342543de82ef95ULL);
  std::uint64_t child = splitmix64(s) ^ (b * 0xaf251af3b0f025b5ULL);
  std::uint64_t s2 = child;
  return RngStream(seed_, splitmix64(s2));
}

Vector sample_std_normal(RngStream& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_std_normal: n must be >= 1");
  Vector out(n);
  for (double& v : out) v = rng.normal();
  return out;
}

std::vector<std::size_t> sample_without_replacement(RngStream& rng,
                                                    std::size_t population,
                                                    std::size_t count) {
  if (count > population) {
    throw std::invalid_argument(
        "sample_without_replacement: count exceeds population");
  }
  // Sparse Fisher-Yates: only touched slots are stored.
  std::vector<std::size_t> out(count);
  std::unordered_map<std::size_t, std::size_t> moved;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform_int(population - i));
    const auto it_j = moved.find(j);
    const std::size_t value_j = (it_j == moved.end()) ? j : it_j->second;
    const auto it_i = moved.find(i);
    const std::size_t value_i = (it_i == moved.end()) ? i : it_i->second;
    out[i] = value_j;
    moved[j] = value_i;
  }
  return out;
}

}  // namespace additest
