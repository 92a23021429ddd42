#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "additest/numerics.hpp"

namespace testutil {

using additest::Matrix;
using additest::RngStream;
using additest::Vector;

/// Gauss-Jordan inverse with partial pivoting. Deliberately unrelated to the
/// library's Cholesky path so it can serve as an independent oracle.
inline Matrix brute_force_inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::fabs(aug(i, col)) > std::fabs(aug(pivot, col))) pivot = i;
    }
    if (std::fabs(aug(pivot, col)) < 1e-300) {
      throw std::runtime_error("brute_force_inverse: singular");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < 2 * n; ++j) std::swap(aug(pivot, j), aug(col, j));
    }
    const double d = aug(col, col);
    for (std::size_t j = 0; j < 2 * n; ++j) aug(col, j) /= d;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      const double f = aug(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < 2 * n; ++j) aug(i, j) -= f * aug(col, j);
    }
  }
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  }
  return inv;
}

/// u^T M u by the explicit triple loop.
inline double quadratic_form(const Vector& u, const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < u.size(); ++j) s += u[i] * m(i, j) * u[j];
  }
  return s;
}

/// Random symmetric positive definite matrix G G^T + eps I.
inline Matrix random_spd(RngStream& rng, std::size_t n, double ridge = 0.5) {
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.normal();
  }
  Matrix a = additest::matmul(g, additest::transpose(g));
  for (std::size_t i = 0; i < n; ++i) a(i, i) += ridge;
  return a;
}

/// Draws x ~ N(0, sigma) through the lower Cholesky factor of sigma.
inline Vector gaussian_draw(RngStream& rng, const Matrix& chol_lower) {
  const std::size_t n = chol_lower.rows();
  Vector z(n);
  for (double& v : z) v = rng.normal();
  Vector x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += chol_lower(i, j) * z[j];
    x[i] = s;
  }
  return x;
}

/// Plain lower Cholesky without tolerances, for sampling in tests.
inline Matrix cholesky_lower(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) throw std::runtime_error("cholesky_lower: not PD");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace testutil
