#pragma once

#include <cstddef>

#include "additest/grid.hpp"
#include "additest/numerics.hpp"
#include "additest/tree.hpp"

namespace additest {

/// Parameters of the internal estimation procedure: n_tilde groups of
/// subsamples sharing a fixed training point, n_mc Monte Carlo subsamples
/// per group, each of size k.
struct InternalConfig {
  std::size_t k = 50;
  std::size_t n_tilde = 50;
  std::size_t n_mc = 250;
  RngStream rng{1};
};

/// The trained ensemble's grid predictions, organized by (group, replicate).
/// Tree (i, j) is row i * n_mc + j of `predictions`.
struct EnsembleFit {
  std::size_t n_tilde = 0;
  std::size_t n_mc = 0;
  std::size_t num_points = 0;
  std::size_t k = 0;
  std::vector<double> predictions;  // (n_tilde * n_mc) x num_points
  std::vector<double> group_means;  // n_tilde x num_points
  Vector overall_mean;              // num_points

  std::size_t num_trees() const { return n_tilde * n_mc; }
  double prediction(std::size_t tree, std::size_t point) const {
    return predictions[tree * num_points + point];
  }
  double group_mean(std::size_t group, std::size_t point) const {
    return group_means[group * num_points + point];
  }
};

/// Covariance pieces for the vector of ensemble predictions:
///   sigma1  - between-group covariance (conditional-expectation part),
///   sigmakk - total per-tree covariance,
///   combined = (k^2/n) sigma1 + (1/m) sigmakk.
struct CovarianceEstimate {
  Matrix sigma1;
  Matrix sigmakk;
  Matrix combined;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
};

/// Builds the ensemble with the internal estimation layout: for each of
/// n_tilde fixed training points, n_mc subsamples of size k containing that
/// point, one tree per subsample, predictions at every grid point. Fitting
/// parallelizes over trees; each tree's random stream is keyed by its
/// (group, replicate) index, so results do not depend on the thread count.
EnsembleFit build_internal(const Dataset& data, const TestGrid& grid,
                           const TreeConfig& tree_cfg, const InternalConfig& cfg,
                           unsigned threads = 0);

/// Sample covariances (unbiased denominators) of the group means and of all
/// per-tree predictions, combined with the variance scaling for an ensemble
/// of m trees of order k on n observations.
CovarianceEstimate estimate_covariance(const EnsembleFit& fit, std::size_t n);

/// The combination rule by itself, entrywise (k^2/n) sigma1 + (1/m) sigmakk.
Matrix combine_prediction_covariance(const Matrix& sigma1, const Matrix& sigmakk,
                                     std::size_t n, std::size_t m,
                                     std::size_t k);

/// Sample covariance of `count` stacked row vectors of length dim.
Matrix rows_covariance(const std::vector<double>& rows, std::size_t count,
                       std::size_t dim);

}  // namespace additest
