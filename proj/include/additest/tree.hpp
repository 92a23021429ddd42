#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "additest/numerics.hpp"

namespace additest {

/// Numeric training data, row-major features plus one response column.
struct Dataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> features;  // n x d
  std::vector<double> response;  // n

  double feature(std::size_t row, std::size_t col) const {
    return features[row * d + col];
  }
};

/// Throws when sizes disagree or any value is non-finite.
void validate_dataset(const Dataset& data);

struct TreeConfig {
  std::size_t min_node_size = 5;
  std::size_t max_depth = 0;  // 0 = unlimited
  double min_split_improvement = 0.0;
  /// Features considered per split; 0 = all (subbagging default). Values in
  /// (0, d) require an RngStream at fit time.
  std::size_t mtry = 0;
};

/// CART-style regression tree: axis-aligned splits, leaf values are the mean
/// response of the training rows routed to the leaf.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t num_leaves() const;

 private:
  std::vector<Node> nodes_;
};

/// Greedy recursive partitioning over the given row subset, minimizing
/// within-node response variance. Split search is exhaustive over midpoints
/// of consecutive distinct values; ties break to the lowest feature index,
/// then lowest threshold, making fits reproducible.
RegressionTree fit_tree(const Dataset& data, std::span<const std::size_t> rows,
                        const TreeConfig& config, RngStream* rng = nullptr);

double predict_tree(const RegressionTree& tree, std::span<const double> x);

}  // namespace additest
