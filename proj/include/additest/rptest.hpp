#pragma once

#include <vector>

#include "additest/hypotest.hpp"

namespace additest {

struct ProjectionConfig {
  std::size_t r = 5;                 // projected dimension, must be < design df
  std::size_t num_projections = 1000;  // M
  RngStream rng{1};
};

struct ProjectionReport {
  std::vector<double> theta;  // per-projection p-values
  double theta_bar = 1.0;
  double u_alpha = 0.0;  // Bates alpha-quantile threshold
  bool reject = false;
  std::size_t r = 0;
  std::size_t num_projections = 0;
  double alpha = 0.05;
  /// Projections replaced because their projected covariance degenerated.
  std::size_t redraws = 0;
};

/// Semi-orthogonal dim x r matrix: standard-normal entries orthonormalized
/// by Gram-Schmidt. Near-dependent draws (astronomically rare) are redrawn.
Matrix sample_projection(std::size_t dim, std::size_t r, RngStream& rng,
                         std::size_t max_retries = 32);

/// T_R = u^T R (R^T Sigma_D R)^{-1} R^T u, chi^2_r under the null.
double projected_statistic(const Vector& u, const Matrix& sigma_d,
                           const Matrix& r_mat);

/// Projection test over an already-built ensemble: every tree's contrast
/// vector is pushed through each projection and the covariance pieces are
/// accumulated per projection in the r-dimensional space.
ProjectionReport run_projection_from_fit(const EnsembleFit& fit, std::size_t n,
                                         const DesignMatrix& design,
                                         const ProjectionConfig& proj,
                                         double alpha, unsigned threads = 0);

/// Full pipeline: ensemble, design, M projections, averaged p-value against
/// the Bates threshold.
ProjectionReport run_projection_test(const Dataset& data, const TestGrid& grid,
                                     TestKind kind, const TreeConfig& tree_cfg,
                                     const InternalConfig& cfg,
                                     const ProjectionConfig& proj, double alpha,
                                     unsigned threads = 0);

/// Decision rule on its own: theta_bar < bates_quantile(alpha, M).
bool projection_decision(const std::vector<double>& theta, double alpha,
                         double* theta_bar_out = nullptr,
                         double* u_alpha_out = nullptr);

}  // namespace additest
