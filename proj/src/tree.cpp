#include "additest/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace additest {

void validate_dataset(const Dataset& data) {
  if (data.n == 0) throw std::invalid_argument("dataset: empty");
  if (data.d == 0) throw std::invalid_argument("dataset: no features");
  if (data.features.size() != data.n * data.d) {
    throw std::invalid_argument("dataset: feature buffer size mismatch");
  }
  if (data.response.size() != data.n) {
    throw std::invalid_argument("dataset: response size mismatch");
  }
  for (double v : data.features) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("dataset: non-finite feature value");
    }
  }
  for (double v : data.response) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("dataset: non-finite response value");
    }
  }
}

double RegressionTree::predict(std::span<const double> x) const {
  int idx = 0;
  while (nodes_[static_cast<std::size_t>(idx)].feature >= 0) {
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    idx = (x[static_cast<std::size_t>(node.feature)] <= node.threshold)
              ? node.left
              : node.right;
  }
  return nodes_[static_cast<std::size_t>(idx)].value;
}

std::size_t RegressionTree::num_leaves() const {
  std::size_t leaves = 0;
  for (const Node& n : nodes_) {
    if (n.feature < 0) ++leaves;
  }
  return leaves;
}

namespace {

struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double improvement = -1.0;
  std::size_t left_count = 0;
};

struct Builder {
  const Dataset& data;
  const TreeConfig& cfg;
  RngStream* rng;
  std::vector<RegressionTree::Node> nodes;
  std::vector<std::size_t> feature_pool;

  Builder(const Dataset& d, const TreeConfig& c, RngStream* r)
      : data(d), cfg(c), rng(r) {
    feature_pool.resize(data.d);
    std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
  }

  // Features examined at this split; a proper subset only when mtry is set.
  std::vector<std::size_t> split_features() {
    if (cfg.mtry == 0 || cfg.mtry >= data.d) return feature_pool;
    if (rng == nullptr) {
      throw std::invalid_argument("fit_tree: mtry < d requires an RngStream");
    }
    auto picks = sample_without_replacement(*rng, data.d, cfg.mtry);
    std::sort(picks.begin(), picks.end());
    return picks;
  }

  SplitCandidate best_split(std::vector<std::size_t>& rows, double node_sse,
                            double sum_y) {
    SplitCandidate best;
    const std::size_t size = rows.size();
    double total_sq = 0.0;
    for (std::size_t idx : rows) {
      const double y = data.response[idx];
      total_sq += y * y;
    }
    std::vector<std::size_t> order(size);
    for (const std::size_t f : split_features()) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = data.feature(rows[a], f);
        const double vb = data.feature(rows[b], f);
        if (va != vb) return va < vb;
        return rows[a] < rows[b];
      });
      double left_sum = 0.0;
      double left_sq = 0.0;
      for (std::size_t t = 0; t + 1 < size; ++t) {
        const double y = data.response[rows[order[t]]];
        left_sum += y;
        left_sq += y * y;
        const std::size_t left_count = t + 1;
        const std::size_t right_count = size - left_count;
        if (left_count < cfg.min_node_size || right_count < cfg.min_node_size) {
          continue;
        }
        const double v_here = data.feature(rows[order[t]], f);
        const double v_next = data.feature(rows[order[t + 1]], f);
        if (v_here == v_next) continue;
        const double right_sum = sum_y - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse_left =
            left_sq - left_sum * left_sum / static_cast<double>(left_count);
        const double sse_right =
            right_sq - right_sum * right_sum / static_cast<double>(right_count);
        const double improvement = node_sse - sse_left - sse_right;
        if (improvement > best.improvement) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (v_here + v_next);
          best.improvement = improvement;
          best.left_count = left_count;
        }
      }
    }
    return best;
  }

  int build(std::vector<std::size_t> rows, std::size_t depth) {
    const std::size_t size = rows.size();
    double sum_y = 0.0;
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : rows) {
      const double y = data.response[idx];
      sum_y += y;
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
    const double mean = sum_y / static_cast<double>(size);

    auto make_leaf = [&]() {
      RegressionTree::Node leaf;
      leaf.value = mean;
      nodes.push_back(leaf);
      return static_cast<int>(nodes.size() - 1);
    };

    if (size < 2 * cfg.min_node_size) return make_leaf();
    if (cfg.max_depth != 0 && depth >= cfg.max_depth) return make_leaf();
    if (min_y == max_y) return make_leaf();

    double node_sse = 0.0;
    for (std::size_t idx : rows) {
      const double dy = data.response[idx] - mean;
      node_sse += dy * dy;
    }
    const SplitCandidate split = best_split(rows, node_sse, sum_y);
    if (!split.found || split.improvement < cfg.min_split_improvement) {
      return make_leaf();
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    left_rows.reserve(split.left_count);
    right_rows.reserve(size - split.left_count);
    for (std::size_t idx : rows) {
      (data.feature(idx, split.feature) <= split.threshold ? left_rows
                                                           : right_rows)
          .push_back(idx);
    }
    rows.clear();
    rows.shrink_to_fit();

    RegressionTree::Node node;
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    nodes.push_back(node);
    const int self = static_cast<int>(nodes.size() - 1);
    const int left = build(std::move(left_rows), depth + 1);
    const int right = build(std::move(right_rows), depth + 1);
    nodes[static_cast<std::size_t>(self)].left = left;
    nodes[static_cast<std::size_t>(self)].right = right;
    return self;
  }
};

}  // namespace

RegressionTree fit_tree(const Dataset& data, std::span<const std::size_t> rows,
                        const TreeConfig& config, RngStream* rng) {
  if (rows.empty()) throw std::invalid_argument("fit_tree: empty row set");
  if (config.min_node_size == 0) {
    throw std::invalid_argument("fit_tree: min_node_size must be >= 1");
  }
  for (std::size_t idx : rows) {
    if (idx >= data.n) throw std::invalid_argument("fit_tree: row out of range");
  }
  Builder builder(data, config, rng);
  builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  return RegressionTree(std::move(builder.nodes));
}

double predict_tree(const RegressionTree& tree, std::span<const double> x) {
  return tree.predict(x);
}

}  // namespace additest
