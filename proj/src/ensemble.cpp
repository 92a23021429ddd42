#include "additest/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "additest/parallel.hpp"

namespace additest {

namespace {

void validate_config(const Dataset& data, const TestGrid& grid,
                     const InternalConfig& cfg) {
  validate_dataset(data);
  if (grid.num_points() == 0) throw ConfigError("build_internal: empty grid");
  if (grid.num_features() != data.d) {
    throw ConfigError("build_internal: grid spans " +
                      std::to_string(grid.num_features()) +
                      " features but the dataset has " + std::to_string(data.d));
  }
  if (cfg.k < 1 || cfg.k > data.n - 1) {
    throw ConfigError(
        "build_internal: subsample size k must satisfy 1 <= k <= n-1");
  }
  if (cfg.n_tilde < 1 || cfg.n_tilde > data.n) {
    throw ConfigError("build_internal: n_tilde must satisfy 1 <= n_tilde <= n");
  }
  if (cfg.n_mc < 1) throw ConfigError("build_internal: n_mc must be >= 1");
  if (cfg.n_tilde * cfg.n_mc < 2) {
    throw ConfigError("build_internal: need at least 2 trees");
  }
}

}  // namespace

EnsembleFit build_internal(const Dataset& data, const TestGrid& grid,
                           const TreeConfig& tree_cfg, const InternalConfig& cfg,
                           unsigned threads) {
  validate_config(data, grid, cfg);
  const std::size_t n = data.n;
  const std::size_t num_points = grid.num_points();
  const std::size_t m = cfg.n_tilde * cfg.n_mc;

  // Fixed points for the groups, drawn once up front.
  RngStream fixed_rng = cfg.rng.substream(0, 0);
  const std::vector<std::size_t> fixed_points =
      sample_without_replacement(fixed_rng, n, cfg.n_tilde);

  // Grid points flattened once; trees predict on raw pointers.
  std::vector<std::vector<double>> points(num_points);
  for (std::size_t p = 0; p < num_points; ++p) points[p] = grid.point(p);

  EnsembleFit fit;
  fit.n_tilde = cfg.n_tilde;
  fit.n_mc = cfg.n_mc;
  fit.num_points = num_points;
  fit.k = cfg.k;
  fit.predictions.assign(m * num_points, 0.0);

  parallel_for(m, threads, [&](std::size_t t) {
    const std::size_t group = t / cfg.n_mc;
    const std::size_t rep = t % cfg.n_mc;
    const std::size_t anchor = fixed_points[group];

    RngStream rng = cfg.rng.substream(group + 1, rep);
    std::vector<std::size_t> rows;
    rows.reserve(cfg.k);
    rows.push_back(anchor);
    // k-1 companions from the other n-1 rows; indices at or past the anchor
    // shift up by one.
    for (std::size_t pick : sample_without_replacement(rng, n - 1, cfg.k - 1)) {
      rows.push_back(pick >= anchor ? pick + 1 : pick);
    }

    const RegressionTree tree = fit_tree(data, rows, tree_cfg, &rng);
    double* out = fit.predictions.data() + t * num_points;
    for (std::size_t p = 0; p < num_points; ++p) {
      out[p] = tree.predict(points[p]);
    }
  });

  fit.group_means.assign(cfg.n_tilde * num_points, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t group = t / cfg.n_mc;
    const double* row = fit.predictions.data() + t * num_points;
    double* mean = fit.group_means.data() + group * num_points;
    for (std::size_t p = 0; p < num_points; ++p) mean[p] += row[p];
  }
  for (double& v : fit.group_means) v /= static_cast<double>(cfg.n_mc);

  fit.overall_mean.assign(num_points, 0.0);
  for (std::size_t g = 0; g < cfg.n_tilde; ++g) {
    const double* mean = fit.group_means.data() + g * num_points;
    for (std::size_t p = 0; p < num_points; ++p) fit.overall_mean[p] += mean[p];
  }
  for (double& v : fit.overall_mean) v /= static_cast<double>(cfg.n_tilde);

  return fit;
}

Matrix rows_covariance(const std::vector<double>& rows, std::size_t count,
                       std::size_t dim) {
  if (count < 2) {
    throw std::invalid_argument("rows_covariance: need at least 2 rows");
  }
  Vector mean(dim, 0.0);
  for (std::size_t r = 0; r < count; ++r) {
    const double* row = rows.data() + r * dim;
    for (std::size_t p = 0; p < dim; ++p) mean[p] += row[p];
  }
  for (double& v : mean) v /= static_cast<double>(count);

  Matrix cov(dim, dim);
  Vector centered(dim);
  for (std::size_t r = 0; r < count; ++r) {
    const double* row = rows.data() + r * dim;
    for (std::size_t p = 0; p < dim; ++p) centered[p] = row[p] - mean[p];
    for (std::size_t i = 0; i < dim; ++i) {
      const double ci = centered[i];
      for (std::size_t j = i; j < dim; ++j) {
        cov(i, j) += ci * centered[j];
      }
    }
  }
  const double denom = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      cov(i, j) /= denom;
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

Matrix combine_prediction_covariance(const Matrix& sigma1, const Matrix& sigmakk,
                                     std::size_t n, std::size_t m,
                                     std::size_t k) {
  if (n == 0 || m == 0) {
    throw std::invalid_argument("combine_prediction_covariance: n, m >= 1");
  }
  const double w1 =
      static_cast<double>(k) * static_cast<double>(k) / static_cast<double>(n);
  const double wkk = 1.0 / static_cast<double>(m);
  Matrix combined(sigma1.rows(), sigma1.cols());
  for (std::size_t i = 0; i < combined.data().size(); ++i) {
    combined.data()[i] = w1 * sigma1.data()[i] + wkk * sigmakk.data()[i];
  }
  return combined;
}

CovarianceEstimate estimate_covariance(const EnsembleFit& fit, std::size_t n) {
  if (fit.n_tilde < 2) {
    throw std::invalid_argument(
        "estimate_covariance: n_tilde >= 2 required for the between-group "
        "covariance");
  }
  if (fit.num_trees() < 2) {
    throw std::invalid_argument("estimate_covariance: need at least 2 trees");
  }
  CovarianceEstimate est;
  est.n = n;
  est.m = fit.num_trees();
  est.k = fit.k;
  est.sigma1 = rows_covariance(fit.group_means, fit.n_tilde, fit.num_points);
  est.sigmakk =
      rows_covariance(fit.predictions, fit.num_trees(), fit.num_points);
  est.combined =
      combine_prediction_covariance(est.sigma1, est.sigmakk, n, est.m, est.k);
  return est;
}

}  // namespace additest
