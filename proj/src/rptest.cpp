#include "additest/rptest.hpp"

#include <algorithm>
#include <cmath>

#include "additest/parallel.hpp"

namespace additest {

Matrix sample_projection(std::size_t dim, std::size_t r, RngStream& rng,
                         std::size_t max_retries) {
  if (r == 0 || r > dim) {
    throw std::invalid_argument("sample_projection: need 1 <= r <= dim");
  }
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    Matrix g(dim, r);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < r; ++j) g(i, j) = rng.normal();
    }
    try {
      return gram_schmidt_columns(g);
    } catch (const RankError&) {
      // Dependent normal draws: redraw.
    }
  }
  throw RankError("sample_projection: repeated rank failures");
}

double projected_statistic(const Vector& u, const Matrix& sigma_d,
                           const Matrix& r_mat) {
  if (r_mat.rows() != u.size() || sigma_d.rows() != u.size() ||
      sigma_d.cols() != u.size()) {
    throw std::invalid_argument("projected_statistic: dimension mismatch");
  }
  const Matrix rt = transpose(r_mat);
  const Vector w = matvec(rt, u);
  const Matrix proj_cov = matmul(rt, matmul(sigma_d, r_mat));
  const CholeskyFactor chol = CholeskyFactor::compute(proj_cov, 1e-12);
  return std::max(dot(w, chol.solve(w)), 0.0);
}

namespace {

struct ProjectedPieces {
  Vector w_bar;     // projected overall contrast, length r
  Matrix combined;  // r x r combined covariance
};

/// Accumulates one projection's statistic pieces from the per-tree contrast
/// vectors (trees x df, row-major).
ProjectedPieces accumulate_projection(const std::vector<double>& tree_u,
                                      std::size_t n_tilde, std::size_t n_mc,
                                      std::size_t df, const Matrix& r_mat,
                                      const Vector& u_bar, std::size_t n,
                                      std::size_t k) {
  const std::size_t r = r_mat.cols();
  const std::size_t m = n_tilde * n_mc;

  std::vector<double> w(m * r, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    const double* ut = tree_u.data() + t * df;
    double* wt = w.data() + t * r;
    for (std::size_t j = 0; j < r; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < df; ++i) s += r_mat(i, j) * ut[i];
      wt[j] = s;
    }
  }

  std::vector<double> group_means(n_tilde * r, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    double* gm = group_means.data() + (t / n_mc) * r;
    const double* wt = w.data() + t * r;
    for (std::size_t j = 0; j < r; ++j) gm[j] += wt[j];
  }
  for (double& v : group_means) v /= static_cast<double>(n_mc);

  ProjectedPieces pieces;
  const Matrix sigma1 = rows_covariance(group_means, n_tilde, r);
  const Matrix sigmakk = rows_covariance(w, m, r);
  pieces.combined = combine_prediction_covariance(sigma1, sigmakk, n, m, k);
  pieces.w_bar = matvec(transpose(r_mat), u_bar);
  return pieces;
}

}  // namespace

bool projection_decision(const std::vector<double>& theta, double alpha,
                         double* theta_bar_out, double* u_alpha_out) {
  if (theta.empty()) {
    throw std::invalid_argument("projection_decision: no p-values");
  }
  double sum = 0.0;
  for (double t : theta) sum += t;
  const double theta_bar = sum / static_cast<double>(theta.size());
  const double u_alpha =
      bates_quantile(alpha, static_cast<unsigned>(theta.size()));
  if (theta_bar_out) *theta_bar_out = theta_bar;
  if (u_alpha_out) *u_alpha_out = u_alpha;
  return theta_bar < u_alpha;
}

ProjectionReport run_projection_from_fit(const EnsembleFit& fit, std::size_t n,
                                         const DesignMatrix& design,
                                         const ProjectionConfig& proj,
                                         double alpha, unsigned threads) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("run_projection_from_fit: alpha in (0,1)");
  }
  if (proj.num_projections < 1) {
    throw ConfigError("projection test: need at least one projection");
  }
  const std::size_t df = design.df;
  if (proj.r < 1 || proj.r >= df) {
    throw ConfigError("projection test: projected dimension r must satisfy "
                      "1 <= r < " +
                      std::to_string(df) + " (the design's residual df)");
  }
  if (fit.num_points != design.matrix.cols()) {
    throw std::invalid_argument(
        "run_projection_from_fit: design and fit grids differ");
  }

  const std::size_t m = fit.num_trees();

  // Per-tree contrast vectors u_t = D v_t, shared by every projection.
  std::vector<double> tree_u(m * df, 0.0);
  parallel_for(m, threads, [&](std::size_t t) {
    const double* v = fit.predictions.data() + t * fit.num_points;
    double* u = tree_u.data() + t * df;
    for (std::size_t i = 0; i < df; ++i) {
      double s = 0.0;
      for (std::size_t p = 0; p < fit.num_points; ++p) {
        s += design.matrix(i, p) * v[p];
      }
      u[i] = s;
    }
  });
  const Vector u_bar = matvec(design.matrix, fit.overall_mean);
  const bool null_contrast =
      max_abs(u_bar) <= 1e-10 * std::max(1.0, max_abs(fit.overall_mean));

  // All projections generated up front from one stream, then fixed;
  // replacements for degenerate projections continue the same stream.
  RngStream proj_rng = proj.rng;
  std::vector<Matrix> projections(proj.num_projections);
  for (Matrix& r_mat : projections) {
    r_mat = sample_projection(df, proj.r, proj_rng);
  }

  ProjectionReport report;
  report.r = proj.r;
  report.num_projections = proj.num_projections;
  report.alpha = alpha;
  report.theta.assign(proj.num_projections, 1.0);

  constexpr std::size_t kMaxRedrawsPerProjection = 16;
  std::vector<std::size_t> redraws(proj.num_projections, 0);

  parallel_for(proj.num_projections, threads, [&](std::size_t c) {
    Matrix r_mat = projections[c];
    for (std::size_t attempt = 0;; ++attempt) {
      const ProjectedPieces pieces = accumulate_projection(
          tree_u, fit.n_tilde, fit.n_mc, df, r_mat, u_bar, n, fit.k);
      try {
        const CholeskyFactor chol =
            CholeskyFactor::compute(pieces.combined, 1e-12);
        const double stat =
            std::max(dot(pieces.w_bar, chol.solve(pieces.w_bar)), 0.0);
        report.theta[c] =
            1.0 - chi_sq_cdf(stat, static_cast<unsigned>(proj.r));
        return;
      } catch (const SingularMatrixError& e) {
        if (null_contrast) {
          // Degenerate ensemble with an exactly additive mean: statistic 0.
          report.theta[c] = 1.0;
          return;
        }
        if (attempt >= kMaxRedrawsPerProjection) {
          throw SingularMatrixError(
              std::string("projection test: projected covariance repeatedly "
                          "singular (") +
                  e.what() + ")",
              e.pivot_index(), e.pivot_value());
        }
        // Replacement entropy is keyed by (projection, attempt), so the
        // redraw sequence does not depend on which worker runs it.
        RngStream redraw_rng = proj.rng.substream(c + 1, attempt + 1);
        r_mat = sample_projection(df, proj.r, redraw_rng);
        ++redraws[c];
      }
    }
  });

  for (std::size_t c = 0; c < proj.num_projections; ++c) {
    report.redraws += redraws[c];
  }
  report.reject = projection_decision(report.theta, alpha, &report.theta_bar,
                                      &report.u_alpha);
  return report;
}

ProjectionReport run_projection_test(const Dataset& data, const TestGrid& grid,
                                     TestKind kind, const TreeConfig& tree_cfg,
                                     const InternalConfig& cfg,
                                     const ProjectionConfig& proj, double alpha,
                                     unsigned threads) {
  const DesignMatrix design = design_for(kind, grid);
  const EnsembleFit fit = build_internal(data, grid, tree_cfg, cfg, threads);
  return run_projection_from_fit(fit, data.n, design, proj, alpha, threads);
}

}  // namespace additest
