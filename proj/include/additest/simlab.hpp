#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "additest/rptest.hpp"

namespace additest {

/// One regression function from the simulation study.
struct SimModel {
  std::string id;
  std::size_t dim;      // features in the training set (unused ones included)
  TestKind kind;        // test the study pairs with this model
  bool uses_beta;       // linear-interaction family only
};

/// The study's regression functions: seven null (additive) models, seven
/// alternatives, plus the parameterized linear-interaction family.
const std::vector<SimModel>& sim_registry();

const SimModel& registry_lookup(const std::string& id);

double registry_eval(const std::string& id, std::span<const double> x,
                     double beta = 1.0);

struct SimSpec {
  std::string function_id;
  double beta = 1.0;  // linear-interaction family only
  std::size_t n = 500;
  std::size_t k = 50;
  std::size_t n_tilde = 50;
  std::size_t n_mc = 250;
  /// Grid levels per feature axis (each feature is its own scalar group).
  std::vector<std::vector<double>> axis_levels;
  TestKind kind = TestKind::Total;
  std::size_t replications = 1000;
  double noise_sd = 0.05;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  /// Projected test when proj_r > 0.
  std::size_t proj_r = 0;
  std::size_t proj_m = 0;
  TreeConfig tree;
};

struct RepRecord {
  double statistic = 0.0;  // theta_bar's chi^2 is not scalar; NaN for projected
  double p_value = 1.0;    // averaged p-value for projected tests
  bool reject = false;
};

struct SimResult {
  double rejection_rate = 0.0;
  std::size_t replications = 0;
  double binomial_se = 0.0;  // sqrt(p(1-p)/reps)
  double wall_time_s = 0.0;
  std::vector<RepRecord> records;
};

/// Draws features uniformly on [0,1], adds N(0, sd^2) noise to f, and
/// returns the assembled training set.
Dataset make_uniform_dataset(RngStream& rng, std::size_t n, std::size_t d,
                             const std::function<double(std::span<const double>)>& f,
                             double noise_sd);

/// Runs `replications` independent datasets through the configured test;
/// replication seeds derive from (spec.seed, replication index), so results
/// are reproducible and thread-count invariant.
SimResult run_campaign(const SimSpec& spec, unsigned threads = 0);

/// Campaign with an arbitrary regression function instead of a registry id.
SimResult run_campaign(const SimSpec& spec,
                       const std::function<double(std::span<const double>)>& f,
                       unsigned threads = 0);

/// Least-squares fit of y ~ 1 + x1 + x2 + x1*x2 with a two-sided test of the
/// interaction coefficient (normal approximation to t_{n-4}).
TestReport ols_interaction_ttest(const Dataset& data, double alpha);

}  // namespace additest
