#include <doctest.h>

#include <cmath>
#include <numeric>

#include "additest/tree.hpp"

using namespace additest;

TEST_SUITE_BEGIN("tree");

namespace {

Dataset single_feature_step() {
  // x1 in {0.1, ..., 0.9}, y = 1{x1 > 0.5}.
  Dataset data;
  data.n = 9;
  data.d = 1;
  for (int i = 1; i <= 9; ++i) {
    data.features.push_back(i / 10.0);
    data.response.push_back(i > 5 ? 1.0 : 0.0);
  }
  return data;
}

std::vector<std::size_t> all_rows(const Dataset& data) {
  std::vector<std::size_t> rows(data.n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

Dataset random_dataset(RngStream& rng, std::size_t n, std::size_t d) {
  Dataset data;
  data.n = n;
  data.d = d;
  data.features.resize(n * d);
  data.response.resize(n);
  for (double& v : data.features) v = rng.uniform();
  for (double& v : data.response) v = rng.normal();
  return data;
}

double node_sse(const Dataset& data, const std::vector<std::size_t>& rows) {
  double mean = 0.0;
  for (std::size_t r : rows) mean += data.response[r];
  mean /= static_cast<double>(rows.size());
  double sse = 0.0;
  for (std::size_t r : rows) {
    sse += (data.response[r] - mean) * (data.response[r] - mean);
  }
  return sse;
}

}  // namespace

TEST_CASE("constant response gives a single leaf") {
  Dataset data;
  data.n = 10;
  data.d = 2;
  data.features.resize(20);
  RngStream rng(3);
  for (double& v : data.features) v = rng.uniform();
  data.response.assign(10, 4.25);
  const RegressionTree tree = fit_tree(data, all_rows(data), TreeConfig{});
  CHECK(tree.nodes().size() == 1);
  CHECK(tree.num_leaves() == 1);
  const double x[2] = {0.3, 0.9};
  CHECK(tree.predict(x) == doctest::Approx(4.25));
}

TEST_CASE("step function splits near 0.5 at min_node_size 1") {
  const Dataset data = single_feature_step();
  TreeConfig cfg;
  cfg.min_node_size = 1;
  const RegressionTree tree = fit_tree(data, all_rows(data), cfg);
  REQUIRE(tree.nodes().size() == 3);
  const auto& root = tree.nodes()[0];
  CHECK(root.feature == 0);
  CHECK(root.threshold == doctest::Approx(0.55));
  const double lo[1] = {0.2};
  const double hi[1] = {0.8};
  CHECK(predict_tree(tree, lo) == doctest::Approx(0.0));
  CHECK(predict_tree(tree, hi) == doctest::Approx(1.0));
}

TEST_CASE("leaf-weighted predictions add up to the response total") {
  RngStream rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset data = random_dataset(rng, 40, 3);
    TreeConfig cfg;
    cfg.min_node_size = 1 + rng.uniform_int(5);
    const RegressionTree tree = fit_tree(data, all_rows(data), cfg);
    // Summing each row's prediction is the same as summing leaf means
    // weighted by leaf sizes.
    double pred_sum = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      std::vector<double> x(data.d);
      for (std::size_t j = 0; j < data.d; ++j) x[j] = data.feature(i, j);
      pred_sum += tree.predict(x);
    }
    const double resp_sum =
        std::accumulate(data.response.begin(), data.response.end(), 0.0);
    CHECK(pred_sum == doctest::Approx(resp_sum).epsilon(1e-9));
  }
}

TEST_CASE("fits are deterministic") {
  RngStream rng(5);
  const Dataset data = random_dataset(rng, 60, 2);
  TreeConfig cfg;
  cfg.min_node_size = 2;
  const RegressionTree a = fit_tree(data, all_rows(data), cfg);
  const RegressionTree b = fit_tree(data, all_rows(data), cfg);
  REQUIRE(a.nodes().size() == b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    CHECK(a.nodes()[i].feature == b.nodes()[i].feature);
    CHECK(a.nodes()[i].threshold == b.nodes()[i].threshold);
    CHECK(a.nodes()[i].value == b.nodes()[i].value);
  }
}

TEST_CASE("accepted splits never increase SSE") {
  RngStream rng(23);
  const Dataset data = random_dataset(rng, 50, 2);
  TreeConfig cfg;
  cfg.min_node_size = 3;
  const RegressionTree tree = fit_tree(data, all_rows(data), cfg);

  // Recompute each internal node's row set by routing rows from the root.
  struct NodeRows {
    std::vector<std::size_t> rows;
  };
  std::vector<NodeRows> node_rows(tree.nodes().size());
  node_rows[0].rows = all_rows(data);
  for (std::size_t idx = 0; idx < tree.nodes().size(); ++idx) {
    const auto& node = tree.nodes()[idx];
    if (node.feature < 0) continue;
    auto& left = node_rows[static_cast<std::size_t>(node.left)].rows;
    auto& right = node_rows[static_cast<std::size_t>(node.right)].rows;
    for (std::size_t r : node_rows[idx].rows) {
      (data.feature(r, static_cast<std::size_t>(node.feature)) <= node.threshold
           ? left
           : right)
          .push_back(r);
    }
    const double parent = node_sse(data, node_rows[idx].rows);
    const double children = node_sse(data, left) + node_sse(data, right);
    CHECK(children <= parent + 1e-9);
    CHECK(left.size() >= cfg.min_node_size);
    CHECK(right.size() >= cfg.min_node_size);
  }
}

TEST_CASE("min_node_size 1 with distinct values interpolates") {
  RngStream rng(31);
  Dataset data = random_dataset(rng, 25, 2);
  TreeConfig cfg;
  cfg.min_node_size = 1;
  const RegressionTree tree = fit_tree(data, all_rows(data), cfg);
  for (std::size_t i = 0; i < data.n; ++i) {
    std::vector<double> x(data.d);
    for (std::size_t j = 0; j < data.d; ++j) x[j] = data.feature(i, j);
    CHECK(tree.predict(x) == doctest::Approx(data.response[i]).epsilon(1e-12));
  }
}

TEST_CASE("prediction is piecewise constant") {
  const Dataset data = single_feature_step();
  TreeConfig cfg;
  cfg.min_node_size = 1;
  const RegressionTree tree = fit_tree(data, all_rows(data), cfg);
  // Points on the same side of every split agree.
  const double a[1] = {0.61};
  const double b[1] = {0.62};
  CHECK(tree.predict(a) == tree.predict(b));
}

TEST_CASE("errors") {
  const Dataset data = single_feature_step();
  CHECK_THROWS_AS(fit_tree(data, {}, TreeConfig{}), std::invalid_argument);
  TreeConfig bad;
  bad.min_node_size = 0;
  CHECK_THROWS_AS(fit_tree(data, all_rows(data), bad), std::invalid_argument);
  TreeConfig needs_rng;
  needs_rng.mtry = 1;
  // mtry below d without an RngStream is rejected.
  Dataset two;
  two.n = 4;
  two.d = 2;
  two.features = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  two.response = {0.0, 1.0, 0.0, 1.0};
  needs_rng.min_node_size = 1;
  CHECK_THROWS_AS(fit_tree(two, all_rows(two), needs_rng), std::invalid_argument);
}

TEST_SUITE_END();
