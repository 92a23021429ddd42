#include <doctest.h>

#include <cmath>

#include "additest/hypotest.hpp"
#include "test_util.hpp"

using namespace additest;

TEST_SUITE_BEGIN("hypotest");

namespace {

DesignMatrix identity_design(std::size_t df) {
  DesignMatrix d;
  d.matrix = Matrix::identity(df);
  d.df = df;
  d.kind = DesignKind::Total;
  d.grid_shape = {df};
  return d;
}

FeatureGroup scalar_group(std::size_t feature, std::vector<double> levels) {
  FeatureGroup g;
  g.features = {feature};
  for (double v : levels) g.levels.push_back({v});
  return g;
}

}  // namespace

TEST_CASE("zero residual gives statistic 0 and no rejection") {
  const DesignMatrix d = total_design({2, 2});
  const Vector additive{1.0, 2.0, 3.0, 4.0};  // x1 effect + x2 effect
  const Matrix sigma = Matrix::identity(4);
  const TestReport report = run_grid_test(additive, sigma, d, 0.05);
  CHECK(report.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.p_value == doctest::Approx(1.0));
  CHECK_FALSE(report.reject);
}

TEST_CASE("identity covariance two-dimensional example") {
  // Reduced residual u = (1,1), Sigma_D = I: statistic 2, p = exp(-1).
  const DesignMatrix d = identity_design(2);
  const Vector u{1.0, 1.0};
  const Matrix sigma = Matrix::identity(2);
  const TestReport report = run_grid_test(u, sigma, d, 0.05);
  CHECK(report.statistic == doctest::Approx(2.0));
  CHECK(report.p_value == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(report.df == 2);
}

TEST_CASE("statistic beyond the critical value rejects") {
  // A statistic of 52.30 at df 9 sits far above the 0.95 quantile 16.92.
  const double crit = chi_sq_quantile(0.95, 9);
  CHECK(std::fabs(crit - 16.92) < 0.01);
  CHECK(52.30 > crit);
  const double p = 1.0 - chi_sq_cdf(52.30, 9);
  CHECK(p < 0.05);
}

TEST_CASE("report decision is consistent with quantile and p-value") {
  RngStream rng(21);
  const DesignMatrix d = total_design({3, 3});
  for (int rep = 0; rep < 25; ++rep) {
    Vector v(9);
    for (double& x : v) x = rng.normal();
    const Matrix sigma = testutil::random_spd(rng, 9);
    const TestReport report = run_grid_test(v, sigma, d, 0.05);
    const double crit = chi_sq_quantile(1.0 - report.alpha,
                                        static_cast<unsigned>(report.df));
    CHECK(report.reject == (report.statistic > crit));
    CHECK(report.reject == (report.p_value < report.alpha));
  }
}

TEST_CASE("statistic matches the explicit-inverse oracle") {
  RngStream rng(22);
  for (std::size_t df : {2u, 5u, 10u}) {
    const DesignMatrix d = identity_design(df);
    for (int rep = 0; rep < 10; ++rep) {
      Vector u(df);
      for (double& x : u) x = rng.normal();
      const Matrix sigma = testutil::random_spd(rng, df);
      const TestReport report = run_grid_test(u, sigma, d, 0.05);
      const Matrix inv = testutil::brute_force_inverse(sigma);
      const double oracle = testutil::quadratic_form(u, inv);
      CHECK(std::fabs(report.statistic - oracle) < 1e-9 * std::max(1.0, oracle));
    }
  }
}

TEST_CASE("basis invariance of the quadratic form") {
  RngStream rng(23);
  const Matrix c = total_contrast({4, 3});
  const std::size_t df = 12 - (1 + 3 + 2);
  const DesignMatrix d1 = total_design({4, 3});
  for (int rep = 0; rep < 50; ++rep) {
    // Second basis: a random invertible recombination of the first.
    Matrix t(df, df);
    do {
      for (std::size_t i = 0; i < df; ++i) {
        for (std::size_t j = 0; j < df; ++j) t(i, j) = rng.normal();
      }
    } while (matrix_rank(t) != df);
    DesignMatrix d2;
    d2.matrix = matmul(t, d1.matrix);
    d2.df = df;
    d2.kind = DesignKind::Total;
    d2.grid_shape = {4, 3};

    Vector v(12);
    for (double& x : v) x = rng.normal();
    const Matrix sigma = testutil::random_spd(rng, 12);
    const TestReport r1 = run_grid_test(v, sigma, d1, 0.05);
    const TestReport r2 = run_grid_test(v, sigma, d2, 0.05);
    CHECK(std::fabs(r1.statistic - r2.statistic) <
          1e-8 * std::max(1.0, r1.statistic));
  }
}

TEST_CASE("scale equivariance of the decision") {
  RngStream rng(24);
  const DesignMatrix d = total_design({4, 4});
  Vector v(16);
  for (double& x : v) x = rng.normal();
  const Matrix sigma = testutil::random_spd(rng, 16);
  const TestReport base = run_grid_test(v, sigma, d, 0.05);
  for (double scale : {0.01, 3.0, 250.0}) {
    Vector sv = v;
    for (double& x : sv) x *= scale;
    const Matrix ssigma = (scale * scale) * sigma;
    const TestReport scaled = run_grid_test(sv, ssigma, d, 0.05);
    CHECK(std::fabs(scaled.statistic - base.statistic) <
          1e-8 * std::max(1.0, base.statistic));
    CHECK(scaled.reject == base.reject);
  }
}

TEST_CASE("null calibration against the exact chi-square law") {
  RngStream rng(25);
  const DesignMatrix d = total_design({4, 4});
  const Matrix sigma = testutil::random_spd(rng, 16);
  const Matrix chol = testutil::cholesky_lower(sigma);
  std::vector<double> stats;
  stats.reserve(2000);
  for (int rep = 0; rep < 2000; ++rep) {
    const Vector v = testutil::gaussian_draw(rng, chol);
    stats.push_back(run_grid_test(v, sigma, d, 0.05).statistic);
  }
  const double ks = testutil::ks_distance(
      stats, [](double x) { return chi_sq_cdf(x, 9); });
  CHECK(ks < 0.035);  // 2000 draws; the acceptance suite runs 10^4
}

TEST_CASE("singular covariance with nonzero residual raises") {
  const DesignMatrix d = identity_design(2);
  const Matrix zero(2, 2);
  const Vector u{1.0, 0.5};
  CHECK_THROWS_AS(run_grid_test(u, zero, d, 0.05), SingularMatrixError);
}

TEST_CASE("end-to-end: constant response never rejects") {
  Dataset data;
  data.n = 80;
  data.d = 2;
  RngStream rng(26);
  data.features.resize(160);
  for (double& v : data.features) v = rng.uniform();
  data.response.assign(80, 1.0);
  const TestGrid grid = make_grid(
      {scalar_group(0, {0.3, 0.7}), scalar_group(1, {0.3, 0.7})});
  InternalConfig cfg;
  cfg.k = 15;
  cfg.n_tilde = 6;
  cfg.n_mc = 8;
  cfg.rng = RngStream(41);
  const TestReport report =
      end_to_end_test(data, grid, TestKind::Total, TreeConfig{}, cfg, 0.05);
  CHECK(report.statistic == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_FALSE(report.reject);
}

TEST_CASE("end-to-end: strong interaction rejects, additive signal does not") {
  auto make_data = [](RngStream rng, std::size_t n, bool interact) {
    Dataset data;
    data.n = n;
    data.d = 2;
    data.features.resize(2 * n);
    data.response.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x1 = rng.uniform();
      const double x2 = rng.uniform();
      data.features[2 * i] = x1;
      data.features[2 * i + 1] = x2;
      data.response[i] = (interact ? x1 * x2 : x1 + x2) + 0.05 * rng.normal();
    }
    return data;
  };
  const TestGrid grid = make_grid(
      {scalar_group(0, {0.2, 0.4, 0.6, 0.8}),
       scalar_group(1, {0.2, 0.4, 0.6, 0.8})});
  TreeConfig tree;
  InternalConfig cfg;
  cfg.k = 50;
  cfg.n_tilde = 20;
  cfg.n_mc = 60;
  cfg.rng = RngStream(77);

  const Dataset interacting = make_data(RngStream(1001), 400, true);
  const TestReport power_report =
      end_to_end_test(interacting, grid, TestKind::Total, tree, cfg, 0.05);
  CHECK(power_report.reject);

  const Dataset additive = make_data(RngStream(1002), 400, false);
  const TestReport null_report =
      end_to_end_test(additive, grid, TestKind::Total, tree, cfg, 0.05);
  CHECK(null_report.statistic < power_report.statistic);
}

TEST_CASE("kind/grid compatibility") {
  RngStream rng(27);
  Dataset data;
  data.n = 40;
  data.d = 2;
  data.features.resize(80);
  for (double& v : data.features) v = rng.uniform();
  data.response.assign(40, 0.0);
  const TestGrid grid2 = make_grid(
      {scalar_group(0, {0.3, 0.7}), scalar_group(1, {0.3, 0.7})});
  InternalConfig cfg;
  cfg.k = 8;
  cfg.n_tilde = 4;
  cfg.n_mc = 3;
  CHECK_THROWS_AS(
      end_to_end_test(data, grid2, TestKind::Partial, TreeConfig{}, cfg, 0.05),
      ConfigError);
}

TEST_SUITE_END();
