#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "additest/grid.hpp"

namespace additest {

/// One CLI invocation, fully resolved. Exactly one command per run.
struct RunConfig {
  std::string command;  // test | simulate | grid-preview

  // Data ingestion.
  std::string input_path;
  std::string response;  // empty = last column

  // Grid: groups of column names/indices plus per-group levels or
  // quantile probabilities.
  std::string groups;     // "md,ad,sph;elev,ab"
  std::string levels;     // "0.2,0.4;0.3,0.5" (':' joins multi-feature levels)
  std::string quantiles;  // "0.2,0.4,0.6,0.8;..."

  std::string kind = "total";
  std::size_t k = 50;
  std::size_t n_tilde = 50;
  std::size_t n_mc = 250;
  double alpha = 0.05;
  std::size_t min_node_size = 5;
  std::size_t max_depth = 0;

  bool project = false;
  std::size_t r = 5;
  std::size_t num_projections = 1000;  // M

  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = machine core count
  std::string out_path;  // empty = stdout

  // simulate-only.
  std::string model;
  double beta = 1.0;
  std::size_t n_train = 500;
  std::size_t replications = 1000;
  double noise_sd = 0.05;
};

/// Parses "g1;g2;..." group specs against the dataset's feature names and
/// builds the grid from explicit levels or quantile probabilities.
TestGrid build_grid_from_config(const RunConfig& config, const Dataset& data,
                                const std::vector<std::string>& feature_names);

/// Runs the configured command, writing a JSON report to config.out_path
/// (stdout when empty) and warnings/errors to `err`. Returns the process
/// exit status: 0 on completion (rejections are results, not errors).
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Convenience wrapper over std::cout/std::cerr.
int dispatch(const RunConfig& config);

}  // namespace additest
