#pragma once

#include <string>
#include <vector>

#include "additest/numerics.hpp"
#include "additest/tree.hpp"

namespace additest {

/// One axis of the test grid: a set of features moved together through a
/// list of levels. A level assigns one value to each member feature.
struct FeatureGroup {
  std::vector<std::size_t> features;
  std::vector<std::vector<double>> levels;
};

/// Structured grid of test points. Points enumerate the Cartesian product
/// of group levels in lexicographic order with the LAST group varying
/// fastest; every prediction vector in the project is laid out in this
/// order, so the grid owns the index arithmetic.
class TestGrid {
 public:
  TestGrid(std::vector<FeatureGroup> groups, std::size_t num_features,
           std::vector<std::size_t> shape, std::vector<double> points);

  const std::vector<FeatureGroup>& groups() const { return groups_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t num_groups() const { return groups_.size(); }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_points() const { return num_points_; }

  /// Full d-dimensional coordinates of grid point `index`.
  std::vector<double> point(std::size_t index) const;

  std::size_t flatten(const std::vector<std::size_t>& multi_index) const;
  std::vector<std::size_t> unflatten(std::size_t index) const;

 private:
  std::vector<FeatureGroup> groups_;
  std::size_t num_features_ = 0;
  std::size_t num_points_ = 0;
  std::vector<std::size_t> shape_;
  std::vector<double> points_;  // num_points x num_features, row-major
};

/// Validates that the groups partition {0..d-1} and enumerates the product.
TestGrid make_grid(std::vector<FeatureGroup> groups);

/// Empirical quantiles of one feature column, linearly interpolated between
/// order statistics at positions (n-1)p.
std::vector<double> quantile_levels(const Dataset& data, std::size_t feature,
                                    const std::vector<double>& probs);

/// Warnings for grid levels within 5% of a feature's observed range
/// boundary, where tree predictions are least trustworthy.
std::vector<std::string> boundary_level_warnings(const TestGrid& grid,
                                                 const Dataset& data);

}  // namespace additest
