#include "additest/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace additest {

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::Significance:
      return "significance";
    case DesignKind::Total:
      return "total";
    case DesignKind::Partial:
      return "partial";
    case DesignKind::WeightedAnova:
      return "weighted-anova";
  }
  return "unknown";
}

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::vector<std::size_t> unflatten(std::size_t index,
                                   const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> multi(shape.size());
  for (std::size_t g = shape.size(); g-- > 0;) {
    multi[g] = index % shape[g];
    index /= shape[g];
  }
  return multi;
}

/// Keeps a maximal set of linearly independent rows of `full`, chosen by
/// pivoted Gram-Schmidt, and returns them in their original order.
Matrix select_independent_rows(const Matrix& full, std::size_t expected_rank) {
  const std::size_t m = full.rows();
  std::vector<Vector> work(m);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    work[i] = full.row(i);
    max_norm = std::max(max_norm, norm2(work[i]));
  }
  const double tol = 1e-8 * max_norm;

  std::vector<bool> used(m, false);
  std::vector<std::size_t> selected;
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t best = m;
    double best_norm = tol;
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      const double nn = norm2(work[i]);
      if (nn > best_norm) {
        best_norm = nn;
        best = i;
      }
    }
    if (best == m) break;
    used[best] = true;
    selected.push_back(best);
    Vector q = work[best];
    for (double& v : q) v /= best_norm;
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      const double c = dot(q, work[i]);
      for (std::size_t j = 0; j < q.size(); ++j) work[i][j] -= c * q[j];
    }
  }

  if (selected.size() != expected_rank) {
    throw RankError("contrast reduction found rank " +
                    std::to_string(selected.size()) + ", expected " +
                    std::to_string(expected_rank));
  }
  std::sort(selected.begin(), selected.end());
  Matrix out(expected_rank, full.cols());
  for (std::size_t r = 0; r < expected_rank; ++r) {
    for (std::size_t c = 0; c < full.cols(); ++c) {
      out(r, c) = full(selected[r], c);
    }
  }
  return out;
}

}  // namespace

Matrix significance_contrast(std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) {
    throw std::invalid_argument("significance_contrast: empty axis");
  }
  const std::size_t n = n1 * n2;
  Matrix c(n, n);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t p = i * n2 + j;
      c(p, p) += 1.0;
      for (std::size_t jj = 0; jj < n2; ++jj) {
        c(p, i * n2 + jj) -= 1.0 / static_cast<double>(n2);
      }
    }
  }
  return c;
}

Matrix total_contrast(const std::vector<std::size_t>& shape) {
  const std::size_t d = shape.size();
  if (d < 2) throw std::invalid_argument("total_contrast: need >= 2 axes");
  const std::size_t n = product(shape);
  const double dm1 = static_cast<double>(d) - 1.0;
  Matrix c(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto mp = unflatten(p, shape);
    for (std::size_t q = 0; q < n; ++q) {
      const auto mq = unflatten(q, shape);
      double value = (p == q) ? 1.0 : 0.0;
      // Subtract each axis marginal mean; point q contributes when it
      // agrees with p on that axis.
      for (std::size_t a = 0; a < d; ++a) {
        if (mp[a] == mq[a]) {
          value -= static_cast<double>(shape[a]) / static_cast<double>(n);
        }
      }
      value += dm1 / static_cast<double>(n);
      c(p, q) = value;
    }
  }
  return c;
}

Matrix partial_contrast(const std::array<std::size_t, 3>& shape) {
  const auto [n1, n2, n3] = shape;
  if (n1 == 0 || n2 == 0 || n3 == 0) {
    throw std::invalid_argument("partial_contrast: empty axis");
  }
  const std::size_t n = n1 * n2 * n3;
  Matrix c(n, n);
  const double inv1 = 1.0 / static_cast<double>(n1);
  const double inv2 = 1.0 / static_cast<double>(n2);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t pk = p % n3;
    const std::size_t pj = (p / n3) % n2;
    const std::size_t pi = p / (n2 * n3);
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t qk = q % n3;
      if (pk != qk) continue;  // every term fixes the x3 level
      const std::size_t qj = (q / n3) % n2;
      const std::size_t qi = q / (n2 * n3);
      double value = (p == q) ? 1.0 : 0.0;
      if (pi == qi) value -= inv2;  // f_{i.k}
      if (pj == qj) value -= inv1;  // f_{.jk}
      value += inv1 * inv2;         // f_{..k}
      c(p, q) = value;
    }
  }
  return c;
}

DesignMatrix significance_design(std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) {
    throw std::invalid_argument("significance_design: empty axis");
  }
  if (n2 == 1) {
    throw ConfigError(
        "significance_design: the tested group has a single level, leaving "
        "zero degrees of freedom");
  }
  const std::size_t n = n1 * n2;
  const std::size_t df = n - n1;
  DesignMatrix d;
  d.matrix = select_independent_rows(significance_contrast(n1, n2), df);
  d.df = df;
  d.kind = DesignKind::Significance;
  d.grid_shape = {n1, n2};
  return d;
}

DesignMatrix total_design(const std::vector<std::size_t>& shape) {
  if (shape.size() < 2) {
    throw std::invalid_argument("total_design: need >= 2 axes");
  }
  std::size_t params = 1;
  for (std::size_t levels : shape) {
    if (levels < 2) {
      throw ConfigError(
          "total_design: every axis needs >= 2 levels (a single-level axis "
          "silently changes the degrees of freedom)");
    }
    params += levels - 1;
  }
  const std::size_t n = product(shape);
  const std::size_t df = n - params;
  DesignMatrix d;
  d.matrix = select_independent_rows(total_contrast(shape), df);
  d.df = df;
  d.kind = DesignKind::Total;
  d.grid_shape = shape;
  return d;
}

DesignMatrix partial_design(const std::array<std::size_t, 3>& shape) {
  const auto [n1, n2, n3] = shape;
  if (n1 < 2 || n2 < 2 || n3 < 2) {
    throw ConfigError("partial_design: every axis needs >= 2 levels");
  }
  const std::size_t n = n1 * n2 * n3;
  const std::size_t params = 1 + (n1 - 1) + (n2 - 1) + (n3 - 1) +
                             (n1 - 1) * (n3 - 1) + (n2 - 1) * (n3 - 1);
  const std::size_t df = n - params;
  DesignMatrix d;
  d.matrix = select_independent_rows(partial_contrast(shape), df);
  d.df = df;
  d.kind = DesignKind::Partial;
  d.grid_shape = {n1, n2, n3};
  return d;
}

Matrix anova_residual_projector(const Matrix& z, const Vector& w) {
  if (w.size() != z.rows()) {
    throw std::invalid_argument(
        "anova_residual_projector: weight count must match rows of Z");
  }
  for (double v : w) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(
          "anova_residual_projector: weights must be positive");
    }
  }
  const std::size_t n = z.rows();
  const std::size_t q = z.cols();

  Matrix ztw(q, n);  // Z^T W
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < n; ++j) ztw(i, j) = z(j, i) * w[j];
  }
  const Matrix a = matmul(ztw, z);        // Z^T W Z, possibly singular
  const Matrix a_pinv = pseudo_inverse_spsd(a);
  const Matrix t = matmul(a_pinv, ztw);   // (Z^T W Z)^- Z^T W
  return Matrix::identity(n) - matmul(z, t);
}

Matrix build_partial_Z(const std::array<std::size_t, 3>& shape) {
  const auto [n1, n2, n3] = shape;
  if (n1 == 0 || n2 == 0 || n3 == 0) {
    throw std::invalid_argument("build_partial_Z: empty axis");
  }
  const std::size_t n = n1 * n2 * n3;
  Matrix z(n, n1 * n3 + n2 * n3);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      for (std::size_t k = 0; k < n3; ++k) {
        const std::size_t row = (i * n2 + j) * n3 + k;
        z(row, i * n3 + k) = 1.0;             // F1(x1, x3) block
        z(row, n1 * n3 + j * n3 + k) = 1.0;   // F2(x2, x3) block
      }
    }
  }
  return z;
}

Matrix build_total_Z(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw std::invalid_argument("build_total_Z: empty shape");
  const std::size_t n = product(shape);
  std::size_t cols = 1;
  for (std::size_t levels : shape) cols += levels;
  Matrix z(n, cols);
  for (std::size_t p = 0; p < n; ++p) {
    z(p, 0) = 1.0;
    const auto multi = unflatten(p, shape);
    std::size_t offset = 1;
    for (std::size_t a = 0; a < shape.size(); ++a) {
      z(p, offset + multi[a]) = 1.0;
      offset += shape[a];
    }
  }
  return z;
}

}  // namespace additest
