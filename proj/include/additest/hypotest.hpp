#pragma once

#include <string>

#include "additest/design.hpp"
#include "additest/ensemble.hpp"

namespace additest {

enum class TestKind { Significance, Total, Partial };

std::string to_string(TestKind kind);
TestKind test_kind_from_string(const std::string& name);

struct TestReport {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::string kind;
  /// Smallest pivot met while factoring the contrast covariance; a
  /// conditioning diagnostic (0 when the zero-residual shortcut fired).
  double smallest_pivot = 0.0;
};

/// Quadratic-form test: u = D vhat, statistic = u^T (D Sigma D^T)^{-1} u,
/// compared against chi^2 with the design's degrees of freedom.
TestReport run_grid_test(const Vector& vhat, const Matrix& sigma,
                         const DesignMatrix& design, double alpha);
TestReport run_grid_test(const Vector& vhat, const CovarianceEstimate& cov,
                         const DesignMatrix& design, double alpha);

/// Builds the design implied by (kind, grid shape).
DesignMatrix design_for(TestKind kind, const TestGrid& grid);

/// Full pipeline: internal-estimation ensemble, covariance, design, test.
TestReport end_to_end_test(const Dataset& data, const TestGrid& grid,
                           TestKind kind, const TreeConfig& tree_cfg,
                           const InternalConfig& cfg, double alpha,
                           unsigned threads = 0);

}  // namespace additest
