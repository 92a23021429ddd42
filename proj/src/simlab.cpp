#include "additest/simlab.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "additest/parallel.hpp"

namespace additest {

namespace {

constexpr double kPi = 3.14159265358979323846;

double eval_model(const std::string& id, std::span<const double> x,
                  double beta) {
  if (id == "linear-interaction") return x[0] + x[1] + beta * x[0] * x[1];
  if (id == "x1") return x[0];
  if (id == "exp-x1") return std::exp(x[0]);
  if (id == "exp-x1-plus-sin-pi-x2") return std::exp(x[0]) + std::sin(kPi * x[1]);
  if (id == "x1-plus-x2-plus-x3") return x[0] + x[1] + x[2];
  if (id == "exp-x1-x2-x3-sum") {
    return std::exp(x[0]) + std::exp(x[1]) + std::exp(x[2]);
  }
  if (id == "x1x3-plus-x2x3") return x[0] * x[2] + x[1] * x[2];
  if (id == "exp-x1x3-plus-exp-x2x3") {
    return std::exp(x[0] * x[2]) + std::exp(x[1] * x[2]);
  }
  if (id == "x1x2") return x[0] * x[1];
  if (id == "x1x2x3") return x[0] * x[1] * x[2];
  if (id == "sigmoid-sum") {
    const double e = std::exp(5.0 * (x[0] + x[1]));
    return e / (1.0 + e) - 1.0;
  }
  if (id == "sine-sum-2d") return 0.5 * (1.0 + std::sin(2.0 * kPi * (x[0] + x[1])));
  if (id == "sine-sum-3d") {
    return 0.5 * (1.0 + std::sin(2.0 * kPi * (x[0] + x[1] + x[2])));
  }
  if (id == "bump-2d") {
    const double t = x[0] * x[1];
    return 64.0 * t * t * t * (1.0 - t) * (1.0 - t) * (1.0 - t);
  }
  if (id == "bump-3d") {
    const double t = x[0] * x[1] * x[2];
    return 64.0 * t * t * t * (1.0 - t) * (1.0 - t) * (1.0 - t);
  }
  throw ConfigError("unknown simulation model '" + id + "'");
}

}  // namespace

const std::vector<SimModel>& sim_registry() {
  static const std::vector<SimModel> registry = {
      // Table-1 family; beta = 0 gives the null, beta = 1 the alternative.
      {"linear-interaction", 2, TestKind::Total, true},
      // Null (additive) models.
      {"x1", 2, TestKind::Total, false},
      {"exp-x1", 2, TestKind::Total, false},
      {"exp-x1-plus-sin-pi-x2", 2, TestKind::Total, false},
      {"x1-plus-x2-plus-x3", 3, TestKind::Total, false},
      {"exp-x1-x2-x3-sum", 3, TestKind::Total, false},
      {"x1x3-plus-x2x3", 3, TestKind::Partial, false},
      {"exp-x1x3-plus-exp-x2x3", 3, TestKind::Partial, false},
      // Alternatives.
      {"x1x2", 2, TestKind::Total, false},
      {"x1x2x3", 3, TestKind::Partial, false},
      {"sigmoid-sum", 2, TestKind::Total, false},
      {"sine-sum-2d", 2, TestKind::Total, false},
      {"sine-sum-3d", 3, TestKind::Partial, false},
      {"bump-2d", 2, TestKind::Total, false},
      {"bump-3d", 3, TestKind::Partial, false},
  };
  return registry;
}

const SimModel& registry_lookup(const std::string& id) {
  for (const SimModel& m : sim_registry()) {
    if (m.id == id) return m;
  }
  throw ConfigError("unknown simulation model '" + id + "'");
}

double registry_eval(const std::string& id, std::span<const double> x,
                     double beta) {
  const SimModel& model = registry_lookup(id);
  if (x.size() < model.dim) {
    throw std::invalid_argument("registry_eval: point has too few coordinates");
  }
  return eval_model(id, x, beta);
}

Dataset make_uniform_dataset(RngStream& rng, std::size_t n, std::size_t d,
                             const std::function<double(std::span<const double>)>& f,
                             double noise_sd) {
  Dataset data;
  data.n = n;
  data.d = d;
  data.features.resize(n * d);
  data.response.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) data.features[i * d + j] = rng.uniform();
    const std::span<const double> row(data.features.data() + i * d, d);
    data.response[i] = f(row) + noise_sd * rng.normal();
  }
  return data;
}

namespace {

TestGrid grid_from_axis_levels(const std::vector<std::vector<double>>& axis_levels) {
  std::vector<FeatureGroup> groups;
  groups.reserve(axis_levels.size());
  for (std::size_t a = 0; a < axis_levels.size(); ++a) {
    FeatureGroup g;
    g.features = {a};
    for (double level : axis_levels[a]) g.levels.push_back({level});
    groups.push_back(std::move(g));
  }
  return make_grid(std::move(groups));
}

}  // namespace

SimResult run_campaign(const SimSpec& spec,
                       const std::function<double(std::span<const double>)>& f,
                       unsigned threads) {
  if (spec.replications < 1) {
    throw ConfigError("run_campaign: replications must be >= 1");
  }
  if (spec.noise_sd < 0.0) {
    throw ConfigError("run_campaign: noise_sd must be >= 0");
  }
  if (spec.axis_levels.empty()) {
    throw ConfigError("run_campaign: no grid levels configured");
  }
  const std::size_t d = spec.axis_levels.size();
  const TestGrid grid = grid_from_axis_levels(spec.axis_levels);
  const DesignMatrix design = design_for(spec.kind, grid);

  const auto start = std::chrono::steady_clock::now();
  SimResult result;
  result.replications = spec.replications;
  result.records.assign(spec.replications, RepRecord{});

  // One replication per task; ensembles run single-threaded inside.
  parallel_for(spec.replications, threads, [&](std::size_t rep) {
    RngStream data_rng = RngStream(spec.seed).substream(rep + 1, 0);
    const Dataset data = make_uniform_dataset(data_rng, spec.n, d, f,
                                              spec.noise_sd);
    InternalConfig cfg;
    cfg.k = spec.k;
    cfg.n_tilde = spec.n_tilde;
    cfg.n_mc = spec.n_mc;
    cfg.rng = RngStream(spec.seed).substream(rep + 1, 1);

    RepRecord record;
    if (spec.proj_r > 0) {
      ProjectionConfig proj;
      proj.r = spec.proj_r;
      proj.num_projections = spec.proj_m;
      proj.rng = RngStream(spec.seed).substream(rep + 1, 2);
      const EnsembleFit fit = build_internal(data, grid, spec.tree, cfg, 1);
      const ProjectionReport report =
          run_projection_from_fit(fit, data.n, design, proj, spec.alpha, 1);
      record.statistic = std::numeric_limits<double>::quiet_NaN();
      record.p_value = report.theta_bar;
      record.reject = report.reject;
    } else {
      const EnsembleFit fit = build_internal(data, grid, spec.tree, cfg, 1);
      const CovarianceEstimate cov = estimate_covariance(fit, data.n);
      const TestReport report =
          run_grid_test(fit.overall_mean, cov, design, spec.alpha);
      record.statistic = report.statistic;
      record.p_value = report.p_value;
      record.reject = report.reject;
    }
    result.records[rep] = record;
  });

  std::size_t rejections = 0;
  for (const RepRecord& r : result.records) rejections += r.reject ? 1 : 0;
  result.rejection_rate =
      static_cast<double>(rejections) / static_cast<double>(spec.replications);
  result.binomial_se =
      std::sqrt(result.rejection_rate * (1.0 - result.rejection_rate) /
                static_cast<double>(spec.replications));
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

SimResult run_campaign(const SimSpec& spec, unsigned threads) {
  const SimModel& model = registry_lookup(spec.function_id);
  const double beta = spec.beta;
  const std::string id = spec.function_id;
  if (spec.axis_levels.size() != model.dim) {
    throw ConfigError("run_campaign: model '" + id + "' trains on " +
                      std::to_string(model.dim) +
                      " features; configure one level list per feature");
  }
  return run_campaign(
      spec, [id, beta](std::span<const double> x) { return eval_model(id, x, beta); },
      threads);
}

TestReport ols_interaction_ttest(const Dataset& data, double alpha) {
  validate_dataset(data);
  if (data.d != 2) {
    throw std::invalid_argument("ols_interaction_ttest: needs exactly 2 features");
  }
  if (data.n <= 4) {
    throw std::invalid_argument("ols_interaction_ttest: needs n > 4");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("ols_interaction_ttest: alpha in (0,1)");
  }

  const std::size_t n = data.n;
  constexpr std::size_t p = 4;  // 1, x1, x2, x1*x2
  Matrix xtx(p, p);
  Vector xty(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = data.feature(i, 0);
    const double x2 = data.feature(i, 1);
    const double row[p] = {1.0, x1, x2, x1 * x2};
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += row[a] * data.response[i];
      for (std::size_t b = a; b < p; ++b) xtx(a, b) += row[a] * row[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);
  }

  CholeskyFactor chol = [&] {
    try {
      return CholeskyFactor::compute(xtx, 1e-12);
    } catch (const SingularMatrixError& e) {
      throw RankError(std::string("ols_interaction_ttest: collinear design (") +
                      e.what() + ")");
    }
  }();
  const Vector beta_hat = chol.solve(xty);

  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = data.feature(i, 0);
    const double x2 = data.feature(i, 1);
    const double fitted = beta_hat[0] + beta_hat[1] * x1 + beta_hat[2] * x2 +
                          beta_hat[3] * x1 * x2;
    const double resid = data.response[i] - fitted;
    rss += resid * resid;
  }
  const double sigma2 = rss / static_cast<double>(n - p);

  Vector e3(p, 0.0);
  e3[3] = 1.0;
  const double inv33 = chol.solve(e3)[3];  // (X^T X)^{-1} interaction entry
  const double se = std::sqrt(sigma2 * inv33);

  TestReport report;
  report.kind = "ols-interaction";
  report.df = n - p;
  report.alpha = alpha;
  report.smallest_pivot = chol.smallest_pivot();
  double coef_scale = 1.0;
  for (std::size_t a = 0; a < p; ++a) {
    coef_scale = std::max(coef_scale, std::fabs(beta_hat[a]));
  }
  if (std::fabs(beta_hat[3]) <= 1e-10 * coef_scale) {
    // The interaction estimate is zero to rounding; with an exact fit both
    // the coefficient and its standard error collapse to noise, so the
    // t-ratio is meaningless.
    report.statistic = 0.0;
    report.p_value = 1.0;
  } else if (se == 0.0) {
    report.statistic = std::numeric_limits<double>::infinity();
    report.p_value = 0.0;
  } else {
    const double t = beta_hat[3] / se;
    report.statistic = std::fabs(t);
    report.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(t)));
  }
  report.reject = report.p_value < alpha;
  return report;
}

}  // namespace additest
