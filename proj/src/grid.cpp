#include "additest/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace additest {

TestGrid::TestGrid(std::vector<FeatureGroup> groups, std::size_t num_features,
                   std::vector<std::size_t> shape, std::vector<double> points)
    : groups_(std::move(groups)),
      num_features_(num_features),
      shape_(std::move(shape)),
      points_(std::move(points)) {
  num_points_ = points_.size() / std::max<std::size_t>(num_features_, 1);
}

std::vector<double> TestGrid::point(std::size_t index) const {
  const auto begin =
      points_.begin() + static_cast<std::ptrdiff_t>(index * num_features_);
  return std::vector<double>(begin,
                             begin + static_cast<std::ptrdiff_t>(num_features_));
}

std::size_t TestGrid::flatten(const std::vector<std::size_t>& multi_index) const {
  if (multi_index.size() != shape_.size()) {
    throw std::invalid_argument("flatten: index arity mismatch");
  }
  std::size_t index = 0;
  for (std::size_t g = 0; g < shape_.size(); ++g) {
    if (multi_index[g] >= shape_[g]) {
      throw std::invalid_argument("flatten: index out of range");
    }
    index = index * shape_[g] + multi_index[g];
  }
  return index;
}

std::vector<std::size_t> TestGrid::unflatten(std::size_t index) const {
  if (index >= num_points_) {
    throw std::invalid_argument("unflatten: index out of range");
  }
  std::vector<std::size_t> multi(shape_.size());
  for (std::size_t g = shape_.size(); g-- > 0;) {
    multi[g] = index % shape_[g];
    index /= shape_[g];
  }
  return multi;
}

TestGrid make_grid(std::vector<FeatureGroup> groups) {
  if (groups.empty()) throw std::invalid_argument("make_grid: no groups");

  std::size_t num_features = 0;
  for (const FeatureGroup& g : groups) {
    if (g.features.empty()) {
      throw std::invalid_argument("make_grid: empty feature group");
    }
    if (g.levels.empty()) {
      throw std::invalid_argument("make_grid: group has no levels");
    }
    for (const auto& level : g.levels) {
      if (level.size() != g.features.size()) {
        throw std::invalid_argument(
            "make_grid: level arity does not match group feature count");
      }
    }
    for (std::size_t f : g.features) {
      num_features = std::max(num_features, f + 1);
    }
  }

  std::vector<int> owner(num_features, -1);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t f : groups[gi].features) {
      if (owner[f] != -1) {
        throw std::invalid_argument("make_grid: feature " + std::to_string(f) +
                                    " appears in more than one group");
      }
      owner[f] = static_cast<int>(gi);
    }
  }
  for (std::size_t f = 0; f < num_features; ++f) {
    if (owner[f] == -1) {
      throw std::invalid_argument("make_grid: feature " + std::to_string(f) +
                                  " not covered by any group");
    }
  }

  std::vector<std::size_t> shape(groups.size());
  std::size_t total = 1;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    shape[gi] = groups[gi].levels.size();
    total *= shape[gi];
  }

  // Enumerate the product with the last group varying fastest.
  std::vector<double> points(total * num_features, 0.0);
  std::vector<std::size_t> multi(groups.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    double* out = points.data() + p * num_features;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const FeatureGroup& g = groups[gi];
      const std::vector<double>& level = g.levels[multi[gi]];
      for (std::size_t m = 0; m < g.features.size(); ++m) {
        out[g.features[m]] = level[m];
      }
    }
    for (std::size_t gi = groups.size(); gi-- > 0;) {
      if (++multi[gi] < shape[gi]) break;
      multi[gi] = 0;
    }
  }

  return TestGrid(std::move(groups), num_features, std::move(shape),
                  std::move(points));
}

std::vector<double> quantile_levels(const Dataset& data, std::size_t feature,
                                    const std::vector<double>& probs) {
  if (data.n == 0) throw std::invalid_argument("quantile_levels: empty data");
  if (feature >= data.d) {
    throw std::invalid_argument("quantile_levels: feature out of range");
  }
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] < 1.0)) {
      throw std::invalid_argument("quantile_levels: probs must lie in (0,1)");
    }
    if (i > 0 && !(probs[i] > probs[i - 1])) {
      throw std::invalid_argument(
          "quantile_levels: probs must be strictly increasing");
    }
  }
  std::vector<double> sorted(data.n);
  for (std::size_t i = 0; i < data.n; ++i) sorted[i] = data.feature(i, feature);
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) {
    const double pos = p * static_cast<double>(data.n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    const std::size_t hi = std::min(lo + 1, data.n - 1);
    out.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  return out;
}

std::vector<std::string> boundary_level_warnings(const TestGrid& grid,
                                                 const Dataset& data) {
  std::vector<std::string> warnings;
  if (grid.num_features() > data.d) return warnings;
  for (const FeatureGroup& g : grid.groups()) {
    for (std::size_t m = 0; m < g.features.size(); ++m) {
      const std::size_t f = g.features[m];
      double lo = data.feature(0, f);
      double hi = lo;
      for (std::size_t i = 1; i < data.n; ++i) {
        lo = std::min(lo, data.feature(i, f));
        hi = std::max(hi, data.feature(i, f));
      }
      const double margin = 0.05 * (hi - lo);
      for (const auto& level : g.levels) {
        const double v = level[m];
        if (v - lo < margin || hi - v < margin) {
          std::ostringstream oss;
          oss << "grid level " << v << " for feature " << f
              << " lies within 5% of the observed range [" << lo << ", " << hi
              << "]; tree predictions are biased near the boundary";
          warnings.push_back(oss.str());
        }
      }
    }
  }
  return warnings;
}

}  // namespace additest
