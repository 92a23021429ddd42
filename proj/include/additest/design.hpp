#pragma once

#include <array>
#include <string>
#include <vector>

#include "additest/numerics.hpp"

namespace additest {

enum class DesignKind { Significance, Total, Partial, WeightedAnova };

std::string to_string(DesignKind kind);

/// Full-row-rank contrast matrix whose rows span the residual space of a
/// null model on the grid. Row count equals the test's degrees of freedom;
/// the quadratic-form statistic is invariant to which basis rows are kept.
struct DesignMatrix {
  Matrix matrix;  // df x N
  std::size_t df = 0;
  DesignKind kind = DesignKind::Total;
  std::vector<std::size_t> grid_shape;
};

// Full N x N residual operators (rank-deficient). Each maps a prediction
// vector to its per-point deviation from the null model's fitted averages.
Matrix significance_contrast(std::size_t n1, std::size_t n2);
Matrix total_contrast(const std::vector<std::size_t>& shape);
Matrix partial_contrast(const std::array<std::size_t, 3>& shape);

/// Contrasts F_ij - f_{i.}: deviations from the per-level-of-the-reduced-
/// group average. df = N - n1. n2 == 1 leaves nothing to test and is
/// rejected.
DesignMatrix significance_design(std::size_t n1, std::size_t n2);

/// Residuals of the main-effects (fully additive) model on a d-way grid.
/// df = N - (1 + sum(N_i - 1)). Axes with a single level are rejected rather
/// than silently dropped, since they shift the degrees of freedom.
DesignMatrix total_design(const std::vector<std::size_t>& shape);

/// Residuals after removing F1(x1,x3) + F2(x2,x3) on a 3-way grid:
/// F_ijk - f_{i.k} - f_{.jk} + f_{..k}.
/// df = N - (1 + sum(N_i-1) + (N1-1)(N3-1) + (N2-1)(N3-1)).
DesignMatrix partial_design(const std::array<std::size_t, 3>& shape);

/// Residual projector I - Z (Z^T W Z)^- Z^T W of a weighted least-squares
/// fit. Z may be rank deficient (additive-model indicators always are); the
/// generalized inverse keeps the projector well defined.
Matrix anova_residual_projector(const Matrix& z, const Vector& w);

/// 0/1 indicator matrix Z for the partial-additivity model: row of grid
/// point (i,j,k) selects the F1(x1,x3) and F2(x2,x3) coefficients from the
/// concatenated coefficient vector.
Matrix build_partial_Z(const std::array<std::size_t, 3>& shape);

/// Indicator matrix for the fully additive model: an intercept column plus
/// one indicator column per level of each axis.
Matrix build_total_Z(const std::vector<std::size_t>& shape);

}  // namespace additest
