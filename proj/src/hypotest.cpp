#include "additest/hypotest.hpp"

#include <algorithm>
#include <cmath>

namespace additest {

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::Significance:
      return "significance";
    case TestKind::Total:
      return "total";
    case TestKind::Partial:
      return "partial";
  }
  return "unknown";
}

TestKind test_kind_from_string(const std::string& name) {
  if (name == "significance") return TestKind::Significance;
  if (name == "total") return TestKind::Total;
  if (name == "partial") return TestKind::Partial;
  throw ConfigError("unknown test kind '" + name +
                    "' (expected significance|total|partial)");
}

TestReport run_grid_test(const Vector& vhat, const Matrix& sigma,
                         const DesignMatrix& design, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("run_grid_test: alpha must lie in (0,1)");
  }
  if (vhat.size() != design.matrix.cols() || sigma.rows() != vhat.size() ||
      sigma.cols() != vhat.size()) {
    throw std::invalid_argument("run_grid_test: dimension mismatch");
  }

  const Vector u = matvec(design.matrix, vhat);
  const Matrix sigma_d =
      matmul(matmul(design.matrix, sigma), transpose(design.matrix));

  TestReport report;
  report.df = design.df;
  report.alpha = alpha;
  report.kind = to_string(design.kind);

  double statistic = 0.0;
  try {
    CholeskyFactor chol = CholeskyFactor::compute(sigma_d, 1e-12);
    statistic = dot(u, chol.solve(u));
    report.smallest_pivot = chol.smallest_pivot();
  } catch (const SingularMatrixError& e) {
    // A covariance that degenerates together with an exactly additive
    // prediction vector (constant responses, say) is a clean non-rejection,
    // not a failure.
    if (max_abs(u) <= 1e-10 * std::max(1.0, max_abs(vhat))) {
      statistic = 0.0;
      report.smallest_pivot = 0.0;
    } else {
      throw SingularMatrixError(
          std::string("contrast covariance is numerically singular (") +
              e.what() +
              "); grow the ensemble (larger n_mc / n_tilde) or switch to the "
              "random-projection test",
          e.pivot_index(), e.pivot_value());
    }
  }

  report.statistic = std::max(statistic, 0.0);
  report.p_value = 1.0 - chi_sq_cdf(report.statistic, static_cast<unsigned>(report.df));
  report.reject = report.p_value < alpha;
  return report;
}

TestReport run_grid_test(const Vector& vhat, const CovarianceEstimate& cov,
                         const DesignMatrix& design, double alpha) {
  return run_grid_test(vhat, cov.combined, design, alpha);
}

DesignMatrix design_for(TestKind kind, const TestGrid& grid) {
  const std::vector<std::size_t>& shape = grid.shape();
  switch (kind) {
    case TestKind::Significance:
      if (shape.size() != 2) {
        throw ConfigError(
            "significance test needs exactly 2 feature groups (reduced, "
            "additional)");
      }
      return significance_design(shape[0], shape[1]);
    case TestKind::Total:
      if (shape.size() < 2) {
        throw ConfigError("total-additivity test needs >= 2 feature groups");
      }
      return total_design(shape);
    case TestKind::Partial:
      if (shape.size() != 3) {
        throw ConfigError(
            "partial-additivity test needs exactly 3 feature groups (the two "
            "tested groups plus the conditioning group)");
      }
      return partial_design({shape[0], shape[1], shape[2]});
  }
  throw ConfigError("design_for: unknown kind");
}

TestReport end_to_end_test(const Dataset& data, const TestGrid& grid,
                           TestKind kind, const TreeConfig& tree_cfg,
                           const InternalConfig& cfg, double alpha,
                           unsigned threads) {
  const DesignMatrix design = design_for(kind, grid);
  const EnsembleFit fit = build_internal(data, grid, tree_cfg, cfg, threads);
  const CovarianceEstimate cov = estimate_covariance(fit, data.n);
  return run_grid_test(fit.overall_mean, cov, design, alpha);
}

}  // namespace additest
